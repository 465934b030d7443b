#pragma once

// Reference implementations used only by tests. They restate the model
// equations in the most direct form available (enumeration, bisection,
// straight-line loops) and share no numerical code with the library.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace oracle {

/// min and max of sum f_p y_p / sum f_p over the 2^P vertices of the box.
inline std::pair<double, double> vertex_enumeration(std::span<const double> lower,
                                                    std::span<const double> upper,
                                                    std::span<const double> y) {
  const std::size_t P = y.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t mask = 0; mask < (std::size_t{1} << P); ++mask) {
    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
      const double f = (mask >> p) & 1 ? upper[p] : lower[p];
      num += f * y[p];
      den += f;
    }
    if (den <= 0.0) continue;
    lo = std::min(lo, num / den);
    hi = std::max(hi, num / den);
  }
  return {lo, hi};
}

inline double gauss(double x, double c, double s) {
  return std::exp(-0.5 * ((x - c) / s) * ((x - c) / s));
}

/// Type-1 TSK with HTSK-scaled Gaussian antecedents (effective width sqrt(M) sigma).
/// c, sigma, a are P x M row-major.
inline double type1_tsk(std::span<const double> x, std::span<const double> c,
                        std::span<const double> sigma, std::span<const double> a,
                        std::span<const double> a0) {
  const std::size_t M = x.size();
  const std::size_t P = a0.size();
  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < P; ++p) {
    double f = 1.0;
    double y = a0[p];
    for (std::size_t m = 0; m < M; ++m) {
      f *= gauss(x[m], c[p * M + m], std::sqrt(static_cast<double>(M)) * sigma[p * M + m]);
      y += a[p * M + m] * x[m];
    }
    num += f * y;
    den += f;
  }
  return num / den;
}

/// Endpoint of {u : exp(-(u-g)^2 / (2 s^2)) >= alpha} on one side of g,
/// found by bisection rather than by inverting the Gaussian.
inline double smf_cut_endpoint(double g, double s, double alpha, int side) {
  // The alpha = 1 cut is the mode itself; bisection would stall where the
  // Gaussian rounds to 1.
  if (s == 0.0 || alpha >= 1.0) return g;
  double inside = g;
  double outside = g + side * 50.0 * s;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (inside + outside);
    if (mid == inside || mid == outside) break;
    if (gauss(mid, g, s) >= alpha) inside = mid;
    else outside = mid;
  }
  return inside;
}

/// Z-GT2 model in constrained form; matrices P x M row-major.
struct ZadehModel {
  std::size_t P = 0, M = 0;
  int K = 1;
  std::vector<double> c, sigma, a, a0;
  std::vector<double> left_scale, right_scale;  // per dimension, in [0,1]
};

/// Point output and alpha_0 interval, evaluated plane by plane with
/// bisection alpha-cuts and vertex-enumeration type reduction.
struct Prediction {
  double point, lower, upper;
};

inline Prediction brute_force_zgt2(std::span<const double> x, const ZadehModel& m) {
  const double r0 = std::sqrt(-2.0 * std::log(0.01));
  std::vector<double> alphas{0.01};
  for (int k = 1; k <= m.K; ++k) alphas.push_back(static_cast<double>(k) / m.K);

  std::vector<double> y(m.P);
  for (std::size_t p = 0; p < m.P; ++p) {
    y[p] = m.a0[p];
    for (std::size_t d = 0; d < m.M; ++d) y[p] += m.a[p * m.M + d] * x[d];
  }

  double num = 0.0, den = 0.0;
  Prediction out{};
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    std::vector<double> flo(m.P, 1.0), fhi(m.P, 1.0);
    for (std::size_t p = 0; p < m.P; ++p) {
      for (std::size_t d = 0; d < m.M; ++d) {
        const double s = std::sqrt(static_cast<double>(m.M)) * m.sigma[p * m.M + d];
        const double g = gauss(x[d], m.c[p * m.M + d], s);
        const double sl = g / r0 * m.left_scale[d];
        const double sr = (1.0 - g) / r0 * m.right_scale[d];
        flo[p] *= smf_cut_endpoint(g, sl, alphas[k], -1);
        fhi[p] *= smf_cut_endpoint(g, sr, alphas[k], +1);
      }
    }
    const auto [lo, hi] = vertex_enumeration(flo, fhi, y);
    if (k == 0) out.lower = lo, out.upper = hi;
    num += alphas[k] * 0.5 * (lo + hi);
    den += alphas[k];
  }
  out.point = num / den;
  return out;
}

}  // namespace oracle
