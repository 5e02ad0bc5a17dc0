#ifndef TPCA_PROFILES_HPP
#define TPCA_PROFILES_HPP

#include <string>
#include <vector>

#include "tpca/grid.hpp"

namespace tpca {

/// A single p-channel curve sampled on a grid; values is p x n.
struct ProfileFunction {
    SampleGrid grid;
    Eigen::MatrixXd values;

    int p() const { return static_cast<int>(values.rows()); }
    void validate() const;
};

/// An ordered sequence of m multichannel profiles on a shared grid.
/// Immutable after construction; safe to share across workers.
struct ProfileSet {
    SampleGrid grid;
    std::vector<Eigen::MatrixXd> profiles;  // each p x n

    int m() const { return static_cast<int>(profiles.size()); }
    int p() const { return profiles.empty() ? 0 : static_cast<int>(profiles[0].rows()); }
    int n() const { return grid.n(); }

    void validate() const;
};

enum class FileFormat { csv, json };

FileFormat format_from_path(const std::string& path);

ProfileSet load_profiles(const std::string& path, FileFormat format);
void save_profiles(const ProfileSet& data, const std::string& path, FileFormat format);

}  // namespace tpca

#endif
