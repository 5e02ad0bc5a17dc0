#ifndef TPCA_CHI2_HPP
#define TPCA_CHI2_HPP

namespace tpca {

// Regularized incomplete gamma functions. gamma_q(a,x) = P(Gamma(a,1) > x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);
// log gamma_q, stable far into the tail (no underflow to -inf for x up to ~1e4).
double log_gamma_q(double a, double x);

// Survival function of chi-square with p degrees of freedom.
double chi2_survival(int p, double c);
double chi2_log_survival(int p, double c);
double chi2_cdf(int p, double c);
double chi2_pdf(int p, double c);

// Standard normal CDF and upper-alpha quantile z_alpha.
double normal_cdf(double x);
double normal_upper_quantile(double alpha);

}  // namespace tpca

#endif
