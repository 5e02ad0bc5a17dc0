#include "tpca/profiles.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tpca {

using nlohmann::json;

void ProfileFunction::validate() const {
    grid.validate();
    if (values.cols() != grid.n())
        throw std::invalid_argument("ProfileFunction: values/grid size mismatch");
    if (!values.allFinite())
        throw std::domain_error("ProfileFunction: non-finite value");
}

void ProfileSet::validate() const {
    grid.validate();
    if (profiles.size() < 2)
        throw std::invalid_argument("ProfileSet: need m >= 2 profiles");
    const int pch = static_cast<int>(profiles[0].rows());
    if (pch < 1) throw std::invalid_argument("ProfileSet: need p >= 1 channels");
    for (const auto& x : profiles) {
        if (x.rows() != pch || x.cols() != grid.n())
            throw std::invalid_argument("ProfileSet: inconsistent profile shape");
        if (!x.allFinite())
            throw std::domain_error("ProfileSet: non-finite value");
    }
}

FileFormat format_from_path(const std::string& path) {
    const auto dot = path.find_last_of('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (ext == "json") return FileFormat::json;
    return FileFormat::csv;
}

namespace {

std::string sidecar_path(const std::string& path) { return path + ".grid.json"; }

SampleGrid load_grid_sidecar(const std::string& path, int n_seen) {
    std::ifstream in(sidecar_path(path));
    if (!in) {
        // No sidecar: uniform grid over [0,1] inferred from t_index range.
        return SampleGrid::uniform(n_seen);
    }
    json j;
    in >> j;
    std::vector<double> t = j.at("t").get<std::vector<double>>();
    if (j.contains("n") && j["n"].get<int>() != static_cast<int>(t.size()))
        throw std::runtime_error("grid sidecar: n does not match t length");
    Eigen::VectorXd tv = Eigen::Map<Eigen::VectorXd>(t.data(), static_cast<int>(t.size()));
    return SampleGrid::from_points(tv);
}

ProfileSet load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument(path + ": empty file");

    struct Cell { long pid; int ch; int ti; double v; };
    std::vector<Cell> cells;
    long max_pid = -1;
    int max_ch = -1, max_ti = -1;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        Cell c{};
        try {
            if (!std::getline(ss, tok, ',')) throw std::invalid_argument("missing field");
            c.pid = std::stol(tok);
            if (!std::getline(ss, tok, ',')) throw std::invalid_argument("missing field");
            c.ch = std::stoi(tok);
            if (!std::getline(ss, tok, ',')) throw std::invalid_argument("missing field");
            c.ti = std::stoi(tok);
            if (!std::getline(ss, tok, ',')) throw std::invalid_argument("missing field");
            c.v = std::stod(tok);
        } catch (const std::exception&) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": malformed row");
        }
        if (c.pid < 0 || c.ch < 0 || c.ti < 0)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": negative index");
        if (!std::isfinite(c.v))
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": non-finite value");
        max_pid = std::max(max_pid, c.pid);
        max_ch = std::max(max_ch, c.ch);
        max_ti = std::max(max_ti, c.ti);
        cells.push_back(c);
    }
    if (cells.empty()) throw std::invalid_argument(path + ": no data rows");

    const int m = static_cast<int>(max_pid) + 1;
    const int p = max_ch + 1;
    const int n = max_ti + 1;
    if (cells.size() != static_cast<size_t>(m) * p * n)
        throw std::invalid_argument(path + ": ragged data (expected m*p*n rows)");

    ProfileSet data;
    data.grid = load_grid_sidecar(path, n);
    if (data.grid.n() != n)
        throw std::invalid_argument(path + ": grid sidecar length does not match t_index range");
    data.profiles.assign(m, Eigen::MatrixXd::Constant(p, n, std::numeric_limits<double>::quiet_NaN()));
    for (const auto& c : cells)
        data.profiles[c.pid](c.ch, c.ti) = c.v;
    for (const auto& x : data.profiles)
        if (!x.allFinite())
            throw std::invalid_argument(path + ": ragged data (missing cells)");
    data.validate();
    return data;
}

ProfileSet load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    std::vector<double> t = j.at("grid").get<std::vector<double>>();
    const int p = j.at("p").get<int>();
    ProfileSet data;
    data.grid = SampleGrid::from_points(
        Eigen::Map<Eigen::VectorXd>(t.data(), static_cast<int>(t.size())));
    const int n = data.grid.n();
    for (const auto& prof : j.at("profiles")) {
        if (static_cast<int>(prof.size()) != p)
            throw std::invalid_argument(path + ": profile with wrong channel count");
        Eigen::MatrixXd x(p, n);
        for (int ch = 0; ch < p; ++ch) {
            const auto& row = prof[ch];
            if (static_cast<int>(row.size()) != n)
                throw std::invalid_argument(path + ": channel with wrong grid length");
            for (int a = 0; a < n; ++a) x(ch, a) = row[a].get<double>();
        }
        data.profiles.push_back(std::move(x));
    }
    data.validate();
    return data;
}

void save_csv(const ProfileSet& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    out << "profile_id,channel,t_index,value\n";
    for (int i = 0; i < data.m(); ++i)
        for (int ch = 0; ch < data.p(); ++ch)
            for (int a = 0; a < data.n(); ++a)
                out << i << ',' << ch << ',' << a << ',' << data.profiles[i](ch, a) << '\n';
    json g;
    g["n"] = data.n();
    g["t"] = std::vector<double>(data.grid.points.data(),
                                 data.grid.points.data() + data.n());
    std::ofstream side(sidecar_path(path));
    side << g.dump() << '\n';
}

void save_json(const ProfileSet& data, const std::string& path) {
    json j;
    j["grid"] = std::vector<double>(data.grid.points.data(),
                                    data.grid.points.data() + data.n());
    j["p"] = data.p();
    json profs = json::array();
    for (const auto& x : data.profiles) {
        json prof = json::array();
        for (int ch = 0; ch < data.p(); ++ch) {
            std::vector<double> row(data.n());
            for (int a = 0; a < data.n(); ++a) row[a] = x(ch, a);
            prof.push_back(std::move(row));
        }
        profs.push_back(std::move(prof));
    }
    j["profiles"] = std::move(profs);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump() << '\n';
}

}  // namespace

ProfileSet load_profiles(const std::string& path, FileFormat format) {
    return format == FileFormat::csv ? load_csv(path) : load_json(path);
}

void save_profiles(const ProfileSet& data, const std::string& path, FileFormat format) {
    data.validate();
    if (format == FileFormat::csv)
        save_csv(data, path);
    else
        save_json(data, path);
}

}  // namespace tpca
