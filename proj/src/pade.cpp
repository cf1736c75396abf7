#include "sqrtm/pade.hpp"

#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "sqrtm/errors.hpp"
#include "sqrtm/matcore.hpp"

namespace sqrtm {

double frac_binomial_abs(int k) {
  if (k < 1) throw ValidationError("frac_binomial_abs needs k >= 1");
  // |C(1/2,k)| = |C(1/2,k-1)| * (k - 3/2) / k, starting from 1/2
  double value = 0.5;
  for (int i = 2; i <= k; ++i) value *= (i - 1.5) / i;
  return value;
}

TaylorCoefficients taylor_coefficients(int k_max) {
  if (k_max < 1) throw ValidationError("taylor_coefficients needs k_max >= 1");
  TaylorCoefficients t;
  t.degree = k_max;
  t.values.resize(static_cast<std::size_t>(k_max));
  t.values[0] = 0.5;
  for (int k = 2; k <= k_max; ++k) {
    t.values[static_cast<std::size_t>(k - 1)] =
        t.values[static_cast<std::size_t>(k - 2)] * (k - 1.5) / k;
  }
  return t;
}

PadeCoefficients solve_pade_coefficients(int m, int n) {
  if (m < 0 || n < 0 || m + n < 1) throw ValidationError("solve_pade_coefficients needs M+N >= 1");
  const int total = m + n;
  const TaylorCoefficients taylor = taylor_coefficients(total);
  const auto c = [&](int k) { return taylor.values[static_cast<std::size_t>(k - 1)]; };

  // One equation per power of z in
  //   (1 - sum p_m z^m) = (1 - sum q_n z^n)(1 - sum c_k z^k):
  //   p_j [j<=M] - q_j [j<=N] + sum_{i<j} c_{j-i} q_i = c_j
  Matrix sys(total, total);
  Matrix rhs(total, 1);
  for (int j = 1; j <= total; ++j) {
    const int row = j - 1;
    if (j <= m) sys(row, j - 1) = 1.0;
    if (j <= n) sys(row, m + j - 1) -= 1.0;
    for (int i = 1; i <= std::min(j - 1, n); ++i) sys(row, m + i - 1) += c(j - i);
    rhs(row, 0) = c(j);
  }

  // The system grows ill-conditioned from degree 6 on; refine the solve with
  // extended-precision residuals to recover the exact dyadic coefficients.
  const detail::LuSolver lu(sys);
  detail::count_solve();
  Matrix x = lu.solve(rhs);
  for (int step = 0; step < 2; ++step) {
    Matrix residual(total, 1);
    for (int i = 0; i < total; ++i) {
      long double acc = rhs(i, 0);
      for (int j = 0; j < total; ++j) {
        acc -= static_cast<long double>(sys(i, j)) * static_cast<long double>(x(j, 0));
      }
      residual(i, 0) = static_cast<double>(acc);
    }
    x += lu.solve(residual);
  }

  PadeCoefficients out;
  out.m_degree = m;
  out.n_degree = n;
  out.p.resize(static_cast<std::size_t>(m));
  out.q.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < m; ++i) out.p[static_cast<std::size_t>(i)] = x(i, 0);
  for (int i = 0; i < n; ++i) out.q[static_cast<std::size_t>(i)] = x(m + i, 0);
  return out;
}

const PadeCoefficients& pade_coefficients(int m, int n) {
  static std::mutex cache_mutex;
  static std::map<std::pair<int, int>, PadeCoefficients> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find({m, n});
  if (it == cache.end()) {
    CountSuspend precompute;
    it = cache.emplace(std::make_pair(m, n), solve_pade_coefficients(m, n)).first;
  }
  return it->second;
}

double verify_no_poles(const PadeCoefficients& c) {
  if (c.m_degree != c.n_degree) {
    throw ValidationError("verify_no_poles expects diagonal coefficients");
  }
  constexpr int kSteps = 10000;  // grid step 1e-4 over [0, 1], endpoints included
  double min_value = 1.0;        // f(0)
  for (int i = 1; i <= kSteps; ++i) {
    const double x = static_cast<double>(i) / kSteps;
    double poly = 0.0;  // Horner on q_N x^N + ... + q_1 x
    for (auto it = c.q.rbegin(); it != c.q.rend(); ++it) poly = (poly + *it) * x;
    min_value = std::min(min_value, 1.0 - poly);
  }
  if (!(min_value > 0.0)) {
    throw PoleDetected("denominator polynomial reaches " + std::to_string(min_value) +
                       " on [0, 1]");
  }
  return min_value;
}

}  // namespace sqrtm
