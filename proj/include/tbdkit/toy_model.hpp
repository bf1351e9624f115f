#pragma once

// C^2 with the indefinite product <v, w>_A = v^dagger A w, A = diag(1, -1),
// and the evolution i du/dt = B u with B = [[0, i], [-i, 0]].

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace tbdkit::toy {

using Vec2c = Eigen::Vector2cd;
using Mat2c = Eigen::Matrix2cd;
using cplx = std::complex<double>;

inline Mat2c metric_A()
{
   Mat2c a;
   a << 1.0, 0.0, 0.0, -1.0;
   return a;
}

inline Mat2c generator_B()
{
   Mat2c b;
   b << 0.0, cplx(0.0, 1.0), cplx(0.0, -1.0), 0.0;
   return b;
}

inline cplx a_product(const Vec2c& v, const Vec2c& w) { return v.dot(metric_A() * w); }

/// v = 0 or <v, v>_A > 0
inline bool in_h_pos(const Vec2c& v)
{
   return v.isZero(0.0) || a_product(v, v).real() > 0.0;
}

/// Norm-zero nonzero vectors: the boundary of H^pos.
inline bool on_null_cone(const Vec2c& v) { return !v.isZero(0.0) && a_product(v, v).real() == 0.0; }

/// u(t) = cos t u0 - i sin t B u0 (B^2 = 1)
inline Vec2c evolve(const Vec2c& u0, double t)
{
   return std::cos(t) * u0 - cplx(0.0, 1.0) * std::sin(t) * (generator_B() * u0);
}

/// u(t)^dagger A u(t) for u0 = (a, b) in closed form.
inline double evolved_norm(cplx a, cplx b, double t)
{
   const double c = std::cos(t), s = std::sin(t);
   return (std::norm(a) - std::norm(b)) * (c * c - s * s) + 4.0 * (std::conj(a) * b).real() * c * s;
}

/// A B - B^dagger A: nonzero means B is not self-adjoint for <.,.>_A.
inline Mat2c a_adjoint_defect()
{
   const Mat2c A = metric_A(), B = generator_B();
   return A * B - B.adjoint() * A;
}

struct BreakdownSample {
   cplx a, b;
   double norm_quarter = 0.0;        ///< t = pi/4
   double norm_three_quarter = 0.0;  ///< t = 3 pi/4
};

struct BreakdownReport {
   std::size_t samples = 0;
   std::size_t survivors = 0; ///< positive at both times
   std::size_t positive_at_quarter = 0;
   std::size_t positive_at_three_quarter = 0;
   double max_formula_mismatch = 0.0; ///< closed form vs a_product(evolve, evolve)
   std::vector<BreakdownSample> survivor_list;
};

inline BreakdownReport positivity_breakdown_search(const std::vector<Vec2c>& samples)
{
   const double tq = std::numbers::pi / 4.0, t3q = 3.0 * std::numbers::pi / 4.0;
   BreakdownReport r;
   for (const Vec2c& u0 : samples) {
      if (!(std::abs(u0(0)) > std::abs(u0(1)))) continue;
      ++r.samples;
      BreakdownSample s{u0(0), u0(1), evolved_norm(u0(0), u0(1), tq), evolved_norm(u0(0), u0(1), t3q)};
      for (double t : {tq, t3q}) {
         const Vec2c u = evolve(u0, t);
         r.max_formula_mismatch =
            std::max(r.max_formula_mismatch, std::abs(a_product(u, u).real() - evolved_norm(u0(0), u0(1), t)));
      }
      const bool p1 = s.norm_quarter > 0.0, p3 = s.norm_three_quarter > 0.0;
      r.positive_at_quarter += p1;
      r.positive_at_three_quarter += p3;
      if (p1 && p3) {
         ++r.survivors;
         r.survivor_list.push_back(s);
      }
   }
   return r;
}

/// n_mag * n_ratio * n_phase samples a = rho, b = rho * ratio * exp(i phi) with
/// ratio in (0, 1), so |a| > |b| holds for every one of them.
inline std::vector<Vec2c> breakdown_grid(int n_mag = 10, int n_ratio = 10, int n_phase = 100)
{
   std::vector<Vec2c> out;
   out.reserve(static_cast<std::size_t>(n_mag * n_ratio * n_phase));
   for (int i = 0; i < n_mag; ++i) {
      const double rho = 0.1 + 0.2 * i;
      for (int j = 0; j < n_ratio; ++j) {
         const double ratio = static_cast<double>(j) / n_ratio;
         for (int k = 0; k < n_phase; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / n_phase;
            out.emplace_back(rho, rho * ratio * std::polar(1.0, phi));
         }
      }
   }
   return out;
}

} // namespace tbdkit::toy
