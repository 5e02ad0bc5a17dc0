#include "tpca/chi2.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tpca {

namespace {

// Lower regularized incomplete gamma by power series; valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// ln of the Lentz continued fraction for the upper tail; valid for x >= a + 1.
double log_gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 2000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return -x + a * std::log(x) - std::lgamma(a) + std::log(h);
}

}  // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("gamma_p: a must be positive");
    if (x < 0.0) throw std::invalid_argument("gamma_p: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - std::exp(log_gamma_q_cf(a, x));
}

double gamma_q(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("gamma_q: a must be positive");
    if (x < 0.0) throw std::invalid_argument("gamma_q: x must be nonnegative");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return std::exp(log_gamma_q_cf(a, x));
}

double log_gamma_q(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("log_gamma_q: a must be positive");
    if (x < 0.0) throw std::invalid_argument("log_gamma_q: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return std::log1p(-gamma_p_series(a, x));
    return log_gamma_q_cf(a, x);
}

double chi2_survival(int p, double c) {
    if (p < 1) throw std::invalid_argument("chi2_survival: p must be >= 1");
    if (c < 0.0) return 1.0;
    return gamma_q(0.5 * p, 0.5 * c);
}

double chi2_log_survival(int p, double c) {
    if (p < 1) throw std::invalid_argument("chi2_log_survival: p must be >= 1");
    if (c <= 0.0) return 0.0;
    return log_gamma_q(0.5 * p, 0.5 * c);
}

double chi2_cdf(int p, double c) {
    if (p < 1) throw std::invalid_argument("chi2_cdf: p must be >= 1");
    if (c <= 0.0) return 0.0;
    return gamma_p(0.5 * p, 0.5 * c);
}

double chi2_pdf(int p, double c) {
    if (p < 1) throw std::invalid_argument("chi2_pdf: p must be >= 1");
    if (c < 0.0) return 0.0;
    if (c == 0.0) return p == 2 ? 0.5 : (p < 2 ? std::numeric_limits<double>::infinity() : 0.0);
    const double a = 0.5 * p;
    return std::exp((a - 1.0) * std::log(c) - 0.5 * c - a * std::log(2.0) - std::lgamma(a));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_upper_quantile(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("normal_upper_quantile: alpha must be in (0,1)");
    // Acklam's rational approximation for the lower quantile, then one
    // Halley refinement against erfc.
    const double pl = 1.0 - alpha;  // lower-tail probability of z_alpha
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double cc[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    double x;
    if (pl < plow) {
        const double q = std::sqrt(-2.0 * std::log(pl));
        x = (((((cc[0] * q + cc[1]) * q + cc[2]) * q + cc[3]) * q + cc[4]) * q + cc[5]) /
            ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    } else if (pl <= phigh) {
        const double q = pl - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - pl));
        x = -(((((cc[0] * q + cc[1]) * q + cc[2]) * q + cc[3]) * q + cc[4]) * q + cc[5]) /
            ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    }
    const double e = normal_cdf(x) - pl;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

}  // namespace tpca
