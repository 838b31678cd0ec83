#ifndef CLUSTSIG_SPECIAL_HPP
#define CLUSTSIG_SPECIAL_HPP

// Special functions backing the distribution layer. Everything here is
// evaluated in log space first; the linear-scale versions exponentiate at
// the end. Tail arguments keep full relative precision this way, which the
// truncated-CDF code depends on.

namespace clustsig {

// log(1 - exp(x)) for x <= 0, stable near both ends.
double log1mexp(double x);

// log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

double log_beta_fn(double a, double b);

// Regularized incomplete beta I_x(a, b) and its log. The log form is exact
// (to relative precision) when I_x is tiny; when I_x is near 1 it degrades
// gracefully to absolute precision. Callers that need the upper tail should
// evaluate log_reg_inc_beta(1 - x, b, a) with an exactly-computed complement.
double reg_inc_beta(double x, double a, double b);
double log_reg_inc_beta(double x, double a, double b);

// Regularized incomplete gamma, lower (P) and upper (Q) tails.
double reg_gamma_p(double a, double x);
double reg_gamma_q(double a, double x);
double log_reg_gamma_p(double a, double x);
double log_reg_gamma_q(double a, double x);

// Standard normal distribution.
double norm_cdf(double x);
double norm_log_cdf(double x);
double norm_log_sf(double x);
double norm_log_pdf(double x);

// Inverse standard normal CDF (rational approximation plus one Halley
// refinement; relative error near machine precision over (1e-280, 1-1e-16)).
double norm_quantile(double p);

// log of the standard normal mass on (a, b), stable when both endpoints sit
// far in the same tail.
double norm_interval_log_mass(double a, double b);

// log erfc(x), valid for all x (asymptotic series past the erfc underflow).
double log_erfc(double x);

}  // namespace clustsig

#endif
