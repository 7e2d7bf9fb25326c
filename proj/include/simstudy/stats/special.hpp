#pragma once

namespace simstudy::stats {

/// log Γ(x) for x > 0 (Lanczos, g = 7, n = 9; ~1e-15 relative).
double log_gamma(double x);

/// log B(a, b).
double log_beta(double a, double b);

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction
/// (at most 200 iterations, tolerance 1e-12), using the symmetry
/// I_x(a,b) = 1 - I_{1-x}(b,a) where the fraction converges faster.
double incomplete_beta(double a, double b, double x);

/// Standard normal CDF Φ(z).
double normal_cdf(double z);
/// Upper tail 1 - Φ(z), accurate in the far tail.
double normal_sf(double z);

/// Student-t CDF with real (non-integer allowed) degrees of freedom.
double student_t_cdf(double t, double df);

/// Two-sided p-value P(|T| ≥ |t|).
double student_t_two_sided(double t, double df);

/// Kolmogorov limiting distribution Q(λ) = P(K > λ)
///   = 2 Σ_{k≥1} (-1)^{k-1} exp(-2 k² λ²).
/// For λ < 1 the equivalent theta-function form is summed instead, since the
/// alternating series converges slowly there.
double kolmogorov_sf(double lambda);

}  // namespace simstudy::stats
