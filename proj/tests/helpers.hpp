#pragma once

#include <complex>
#include <random>
#include <vector>

#include "tbdkit/tbdkit.hpp"

namespace testutil {

using tbdkit::cplx;

inline tbdkit::Vec16c random_spinor(std::mt19937_64& rng) { return tbdkit::random_spinor(rng); }

inline tbdkit::FourVector random_four(std::mt19937_64& rng, double scale = 1.0)
{
   std::uniform_real_distribution<double> u(-scale, scale);
   return {u(rng), u(rng), u(rng), u(rng)};
}

inline tbdkit::FourVector random_timelike(std::mt19937_64& rng)
{
   std::uniform_real_distribution<double> u(-1.0, 1.0);
   const tbdkit::FourVector s{0.0, u(rng), u(rng), u(rng)};
   return {std::sqrt(s.x * s.x + s.y * s.y + s.z * s.z) + 0.5 + std::abs(u(rng)), s.x, s.y, s.z};
}

inline tbdkit::SpinorField band_limited(const tbdkit::Grid& g, std::uint64_t seed, int kmax = 2)
{
   return tbdkit::band_limited_field(g, seed, kmax);
}

inline tbdkit::SpinorField gaussian_field(const tbdkit::Grid& g, const tbdkit::Vec16c& u, double sigma,
                                          const Eigen::Vector3d& centre = Eigen::Vector3d::Zero())
{
   return tbdkit::gaussian_field(g, u, sigma, centre);
}

inline double max_abs(const tbdkit::SpinorField& f)
{
   double m = 0.0;
   for (const auto& v : f) m = std::max(m, std::abs(v));
   return m;
}

} // namespace testutil
