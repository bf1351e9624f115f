#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tbdkit/parallel.hpp"
#include "tbdkit/potentials.hpp"
#include "tbdkit/scalar_product.hpp"

namespace tbdkit {

inline constexpr double positivity_tolerance = 1e-12;

/// Smallest eigenvalue of a Hermitian 16x16 matrix.
inline double min_eigenvalue(const Mat16c& q)
{
   Eigen::SelfAdjointEigenSolver<Mat16c> es(q, Eigen::EigenvaluesOnly);
   return es.eigenvalues()(0);
}

/// Unique r > 0 with r exp(mu r) = g1 g2 / (4 pi |P0|), by bisection. Returns 0
/// when the coupling product is not positive (no violation region).
inline double violation_radius(double g1, double g2, double mu, double P0)
{
   if (P0 == 0.0) throw std::invalid_argument("violation radius needs P0 != 0");
   if (mu < 0.0) throw std::invalid_argument("violation radius needs mu >= 0");
   const double rhs = g1 * g2 / (4.0 * std::numbers::pi * std::abs(P0));
   if (!(rhs > 0.0)) return 0.0;
   double lo = 0.0, hi = rhs; // r e^{mu r} >= r, so the root is <= rhs
   for (int it = 0; it < 400 && hi - lo > 1e-13 * std::max(1.0, rhs); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid * std::exp(mu * mid) < rhs)
         lo = mid;
      else
         hi = mid;
   }
   return 0.5 * (lo + hi);
}

enum class HBranch { plus, minus };

struct HValue {
   double direct = 0.0;     ///< 1 - tanh^2(-y) +- 2y / cosh^2(-y)
   double simplified = 0.0; ///< (1 +- 2y) / cosh^2(y)
};

inline HValue h_function(double y, HBranch branch)
{
   const double sign = branch == HBranch::plus ? 1.0 : -1.0;
   const double t = std::tanh(-y);
   const double c = std::cosh(-y);
   return {1.0 - t * t + sign * 2.0 * y / (c * c), (1.0 + sign * 2.0 * y) / (std::cosh(y) * std::cosh(y))};
}

struct ScalarBound {
   double sup_abs = 0.0;
   bool passed_non_strict = false; ///< sup |f| <= 1
   bool passed_strict = false;     ///< sup |f| < 1
};

/// Samples |f(s)| on s in [0, s_max] for a potential without energy dependence.
inline ScalarBound scalar_bound_check(const PotentialSpec& spec, double s_max = 100.0, std::size_t samples = 20001)
{
   if (depends_on_energy(spec)) throw std::invalid_argument("scalar bound check needs a P^2-independent potential");
   if (samples < 2) throw std::invalid_argument("scalar bound check needs at least two samples");
   ScalarBound out;
   for (std::size_t i = 0; i < samples; ++i) {
      const double s = s_max * static_cast<double>(i) / static_cast<double>(samples - 1);
      out.sup_abs = std::max(out.sup_abs, std::abs(eval_V(spec, -s, 1.0)));
   }
   out.passed_non_strict = out.sup_abs <= 1.0;
   out.passed_strict = out.sup_abs < 1.0;
   return out;
}

struct ViolationPoint {
   Eigen::Vector3d x;
   double r = 0.0;
   double P_sq = 0.0;
   double min_eigenvalue = 0.0;
};

struct EnergyScan {
   double P_sq = 0.0;
   double min_eigenvalue = std::numeric_limits<double>::infinity();
   std::size_t argmin = 0;
   std::size_t violations = 0;
   std::optional<double> analytic_radius;
   std::optional<double> largest_violating_r;   ///< max r among violating nodes
   std::optional<double> smallest_passing_r;    ///< min r among passing nodes
   std::vector<double> point_min_eigenvalues;   ///< per grid node, for CSV export
};

struct PositivityReport {
   KernelFlavor flavor = KernelFlavor::sazdjian;
   std::string potential;
   std::vector<double> P_sq_set;
   double min_eigenvalue = std::numeric_limits<double>::infinity();
   Eigen::Vector3d argmin_x = Eigen::Vector3d::Zero();
   double argmin_P_sq = 0.0;
   std::vector<ViolationPoint> violation_set;
   std::optional<double> analytic_radius; ///< at the first P^2 of the scan
   bool passed = false;
   std::vector<EnergyScan> per_energy;
};

/// Dense eigen-solve of the quadratic-form matrix at every grid node and every
/// P^2 of the set (c.m. frame, P0 = sqrt(P^2)).
inline PositivityReport scan(KernelFlavor flavor, const PotentialSpec& spec, const std::vector<double>& P_sq_set,
                             const Grid& grid, const GammaSet& gammas)
{
   if (P_sq_set.empty()) throw std::invalid_argument("positivity scan needs at least one P^2");
   PositivityReport report;
   report.flavor = flavor;
   report.potential = potential_name(spec);
   report.P_sq_set = P_sq_set;

   for (double P_sq : P_sq_set) {
      if (!(P_sq > 0.0)) throw std::invalid_argument("positivity scan needs P^2 > 0");
      const double P0 = std::sqrt(P_sq);
      const NormKernel kernel = build_kernel(flavor, spec, {P0, 0, 0, 0}, grid, gammas);
      EnergyScan e;
      e.P_sq = P_sq;
      e.point_min_eigenvalues.resize(grid.points());
      parallel_chunks(grid.points(), 64, [&](std::size_t begin, std::size_t end, std::size_t) {
         for (std::size_t pt = begin; pt < end; ++pt) e.point_min_eigenvalues[pt] = min_eigenvalue(kernel.form_matrix_at(pt));
      });
      for (std::size_t pt = 0; pt < grid.points(); ++pt) {
         const double lam = e.point_min_eigenvalues[pt];
         const Eigen::Vector3d x = grid.position(pt);
         const double r = x.norm();
         if (lam < e.min_eigenvalue) {
            e.min_eigenvalue = lam;
            e.argmin = pt;
         }
         if (lam < -positivity_tolerance) {
            ++e.violations;
            report.violation_set.push_back({x, r, P_sq, lam});
            e.largest_violating_r = std::max(e.largest_violating_r.value_or(0.0), r);
         } else {
            e.smallest_passing_r = std::min(e.smallest_passing_r.value_or(std::numeric_limits<double>::infinity()), r);
         }
      }
      if (const auto* y = std::get_if<potential::YukawaTanh>(&spec); y != nullptr && flavor != KernelFlavor::free)
         e.analytic_radius = violation_radius(y->g1, y->g2, y->mu, P0);
      if (e.min_eigenvalue < report.min_eigenvalue) {
         report.min_eigenvalue = e.min_eigenvalue;
         report.argmin_x = grid.position(e.argmin);
         report.argmin_P_sq = P_sq;
      }
      report.per_energy.push_back(std::move(e));
   }
   report.analytic_radius = report.per_energy.front().analytic_radius;
   report.passed = report.min_eigenvalue >= -positivity_tolerance;
   return report;
}

/// Smallest eigenvalue of the quadratic-form matrix at radius r (c.m. frame).
inline double radial_min_eigenvalue(KernelFlavor flavor, const PotentialSpec& spec, double P0, double r,
                                    const GammaSet& gammas)
{
   const auto q = form_coefficients(flavor, kernel_coefficients(flavor, spec, -r * r, P0));
   return min_eigenvalue(q.a * Mat16c::Identity() + q.b * beta12(gammas));
}

/// Radius where the kernel's smallest eigenvalue changes sign, by bisection on
/// [r_lo, r_hi] (negative at r_lo, nonnegative at r_hi).
inline double kernel_boundary_radius(KernelFlavor flavor, const PotentialSpec& spec, double P0, const GammaSet& gammas,
                                     double r_lo, double r_hi)
{
   auto f = [&](double r) { return radial_min_eigenvalue(flavor, spec, P0, r, gammas); };
   if (!(f(r_lo) < 0.0) || !(f(r_hi) >= 0.0))
      throw std::invalid_argument("kernel boundary bracket does not straddle a sign change");
   for (int it = 0; it < 400 && r_hi - r_lo > 1e-14; ++it) {
      const double mid = 0.5 * (r_lo + r_hi);
      if (f(mid) < 0.0)
         r_lo = mid;
      else
         r_hi = mid;
   }
   return 0.5 * (r_lo + r_hi);
}

} // namespace tbdkit
