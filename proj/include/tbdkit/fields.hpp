#pragma once

// Seeded sample fields on a grid.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "tbdkit/grid.hpp"
#include "tbdkit/spinor_algebra.hpp"

namespace tbdkit {

/// Sum of random Fourier modes with |index| <= kmax on each axis and amplitude
/// ~ 1 / (1 + |index|^2); the same continuous function on every grid with
/// n > 2 kmax.
inline SpinorField band_limited_field(const Grid& g, std::uint64_t seed, int kmax = 2)
{
   std::mt19937_64 rng(seed);
   std::normal_distribution<double> n;
   const double dk = 2.0 * std::numbers::pi / g.length();
   struct Term {
      Eigen::Vector3d k;
      Vec16c c;
   };
   std::vector<Term> terms;
   for (int a = -kmax; a <= kmax; ++a)
      for (int b = -kmax; b <= kmax; ++b)
         for (int c = -kmax; c <= kmax; ++c) {
            Vec16c amp;
            for (int s = 0; s < spin_dim; ++s) amp(s) = cplx(n(rng), n(rng)) / (1.0 + a * a + b * b + c * c);
            terms.push_back({dk * Eigen::Vector3d(a, b, c), amp});
         }
   SpinorField f(g.field_size());
   for (std::size_t pt = 0; pt < g.points(); ++pt) {
      const Eigen::Vector3d x = g.position(pt);
      for (const auto& t : terms) {
         const cplx ph = std::exp(I * t.k.dot(x));
         for (int s = 0; s < spin_dim; ++s) f[pt * spin_dim + s] += t.c(s) * ph;
      }
   }
   return f;
}

/// u exp(-|x - centre|^2 / (2 sigma^2))
inline SpinorField gaussian_field(const Grid& g, const Vec16c& u, double sigma,
                                  const Eigen::Vector3d& centre = Eigen::Vector3d::Zero())
{
   SpinorField f(g.field_size());
   for (std::size_t pt = 0; pt < g.points(); ++pt) {
      const double e = std::exp(-(g.position(pt) - centre).squaredNorm() / (2.0 * sigma * sigma));
      for (int s = 0; s < spin_dim; ++s) f[pt * spin_dim + s] = u(s) * e;
   }
   return f;
}

inline Vec16c random_spinor(std::mt19937_64& rng)
{
   std::normal_distribution<double> n;
   Vec16c u;
   for (int i = 0; i < spin_dim; ++i) u(i) = {n(rng), n(rng)};
   return u;
}

} // namespace tbdkit
