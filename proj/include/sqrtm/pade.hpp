#pragma once

#include <vector>

namespace sqrtm {

// |C(1/2, k)| for k = 1..degree; the coefficients of the expansion
// (1 - z)^{1/2} = 1 - sum_k |C(1/2,k)| z^k.
struct TaylorCoefficients {
  int degree = 0;
  std::vector<double> values;
};

// Numerator/denominator coefficients of the [M, N] rational approximant
// matched to that expansion through degree M + N.
struct PadeCoefficients {
  int m_degree = 0;
  int n_degree = 0;
  std::vector<double> p;
  std::vector<double> q;
};

// |C(1/2, k)| via the falling factorial.
double frac_binomial_abs(int k);

TaylorCoefficients taylor_coefficients(int k_max);

// Solves the power-matching linear system for p and q.
PadeCoefficients solve_pade_coefficients(int m, int n);

// Cached accessor. The solve runs once per (m, n), outside any count scope,
// and the returned reference stays valid for the process lifetime.
const PadeCoefficients& pade_coefficients(int m, int n);

// Minimum of f(x) = 1 - sum_n q_n x^n over [0, 1], scanned at step 1e-4.
// Requires diagonal coefficients; throws PoleDetected if the minimum is <= 0.
double verify_no_poles(const PadeCoefficients& c);

}  // namespace sqrtm
