#pragma once

// Equal-time inner products on the flat slice x0 = 0 for fields at one fixed
// total momentum P (c.m. frame). The overall (2 pi)^3 delta prefactor of the
// interacting product is dropped.
//
// Kernels for the implemented (scalar) potentials all have the form
//   K(x) = a(x) 1 + b(x) g1^0 g2^0,
// so they are stored as the two coefficient fields and materialised on demand.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tbdkit/grid.hpp"
#include "tbdkit/kinematics.hpp"
#include "tbdkit/operators.hpp"
#include "tbdkit/potentials.hpp"
#include "tbdkit/spinor_algebra.hpp"

namespace tbdkit {

enum class KernelFlavor { free, sazdjian, crater };

inline KernelFlavor parse_flavor(std::string_view s)
{
   if (s == "free") return KernelFlavor::free;
   if (s == "sazdjian") return KernelFlavor::sazdjian;
   if (s == "crater") return KernelFlavor::crater;
   throw std::invalid_argument("unknown kernel flavor: " + std::string(s));
}

inline std::string_view to_string(KernelFlavor f)
{
   switch (f) {
   case KernelFlavor::free: return "free";
   case KernelFlavor::sazdjian: return "sazdjian";
   case KernelFlavor::crater: return "crater";
   }
   return "?";
}

/// K = a 1 + b g1^0 g2^0 at one point.
struct KernelCoefficients {
   double a = 0.0;
   double b = 0.0;
};

/// Pointwise kernel coefficients.
///   free:     g1^0 g2^0
///   sazdjian: g1^0 g2^0 - V g1^0 g2^0 V + 4 P0^2 dV/d(P^2)
///   crater:   1 - 4 P^2 g1^0 g2^0 dDelta/d(P^2)
inline KernelCoefficients kernel_coefficients(KernelFlavor flavor, const PotentialSpec& spec, double x_perp_sq,
                                              double P0)
{
   const double P_sq = P0 * P0;
   switch (flavor) {
   case KernelFlavor::free: return {0.0, 1.0};
   case KernelFlavor::sazdjian: {
      const double v = eval_V(spec, x_perp_sq, P_sq);
      return {4.0 * P_sq * eval_dV_dP2(spec, x_perp_sq, P_sq), 1.0 - v * v};
   }
   case KernelFlavor::crater: return {1.0, -4.0 * P_sq * delta_dP2(spec, x_perp_sq, P_sq)};
   }
   return {};
}

/// The Hermitian matrix Q with <a, b> = sum a^dagger Q b. Free and Sazdjian
/// kernels sit between Dirac adjoints (Q = g1^0 g2^0 K), the Crater kernel
/// between plain adjoints (Q = K). Q = alpha 1 + beta g1^0 g2^0.
inline KernelCoefficients form_coefficients(KernelFlavor flavor, const KernelCoefficients& k)
{
   if (flavor == KernelFlavor::crater) return k;
   return {k.b, k.a};
}

class NormKernel {
public:
   NormKernel(KernelFlavor flavor, FourVector P, Grid grid, GammaSet gammas)
      : flavor_(flavor), P_(P), grid_(std::move(grid)), gammas_(std::move(gammas)), beta_(beta12(gammas_))
   {
      coefficients_.resize(grid_.points());
   }

   KernelFlavor flavor() const { return flavor_; }
   const FourVector& P() const { return P_; }
   const Grid& grid() const { return grid_; }
   const GammaSet& gammas() const { return gammas_; }
   const Mat16c& beta() const { return beta_; }
   std::vector<KernelCoefficients>& coefficients() { return coefficients_; }
   const std::vector<KernelCoefficients>& coefficients() const { return coefficients_; }

   Mat16c matrix_at(std::size_t pt) const
   {
      const auto& c = coefficients_.at(pt);
      return c.a * Mat16c::Identity() + c.b * beta_;
   }

   Mat16c form_matrix_at(std::size_t pt) const
   {
      const auto q = form_coefficients(flavor_, coefficients_.at(pt));
      return q.a * Mat16c::Identity() + q.b * beta_;
   }

private:
   KernelFlavor flavor_;
   FourVector P_;
   Grid grid_;
   GammaSet gammas_;
   Mat16c beta_;
   std::vector<KernelCoefficients> coefficients_;
};

inline NormKernel build_kernel(KernelFlavor flavor, const PotentialSpec& spec, const FourVector& P, const Grid& grid,
                               const GammaSet& gammas)
{
   require_timelike(P);
   if (P.x != 0.0 || P.y != 0.0 || P.z != 0.0) throw std::invalid_argument("kernels are built in the c.m. frame");
   NormKernel k(flavor, P, grid, gammas);
   auto& c = k.coefficients();
   for (std::size_t pt = 0; pt < grid.points(); ++pt)
      c[pt] = kernel_coefficients(flavor, spec, -grid.position(pt).squaredNorm(), P.t);
   return k;
}

namespace detail {

/// Neumaier-compensated complex accumulator.
class CompensatedSum {
public:
   void add(std::complex<double> v)
   {
      add_part(re_, cre_, v.real());
      add_part(im_, cim_, v.imag());
   }
   std::complex<double> value() const { return {re_ + cre_, im_ + cim_}; }

private:
   static void add_part(double& sum, double& comp, double x)
   {
      const double t = sum + x;
      if (std::abs(sum) >= std::abs(x))
         comp += (sum - t) + x;
      else
         comp += (x - t) + sum;
      sum = t;
   }
   double re_ = 0.0, cre_ = 0.0, im_ = 0.0, cim_ = 0.0;
};

} // namespace detail

/// sum over the x0 = 0 slice of phi_a^dagger phi_b dV.
inline std::complex<double> free_inner_product(const InternalField& a, const InternalField& b)
{
   if (!a.grid().same_as(b.grid())) throw std::invalid_argument("inner product of fields on different grids");
   const SpinorField sa = a.slice(0.0), sb = b.slice(0.0);
   detail::CompensatedSum acc;
   for (std::size_t i = 0; i < sa.size(); ++i) acc.add(std::conj(sa[i]) * sb[i]);
   return acc.value() * a.grid().cell_volume();
}

/// sum over the x0 = 0 slice of bar(phi_a) K phi_b dV (Crater flavor:
/// phi_a^dagger K phi_b), i.e. the quadratic form with matrix Q.
inline std::complex<double> interacting_inner_product(const NormKernel& kernel, const InternalField& a,
                                                      const InternalField& b)
{
   if (!a.grid().same_as(kernel.grid()) || !b.grid().same_as(kernel.grid()))
      throw std::invalid_argument("inner product of fields on a different grid than the kernel");
   if (!(a.P() == kernel.P()) || !(b.P() == kernel.P()))
      throw std::invalid_argument("fields and kernel carry different total momenta");
   const SpinorField sa = a.slice(0.0), sb = b.slice(0.0);
   const Mat16c& beta = kernel.beta();
   detail::CompensatedSum acc;
   for (std::size_t pt = 0; pt < kernel.grid().points(); ++pt) {
      const auto q = form_coefficients(kernel.flavor(), kernel.coefficients()[pt]);
      Eigen::Map<const Vec16c> va(sa.data() + pt * spin_dim), vb(sb.data() + pt * spin_dim);
      const Vec16c qb = q.a * vb + q.b * (beta * vb);
      acc.add(va.dot(qb));
   }
   return acc.value() * kernel.grid().cell_volume();
}

/// Tr(g1.P^ g2.P^ V) over the 16-dim space, in three normalisations. `value`
/// divides by 16, so V = v g1^0 g2^0 gives v and the test v < 1 agrees with the
/// scalar bound |f| < 1.
struct TraceCondition {
   double value = 0.0;             ///< Tr / 16, real part
   double quarter_trace = 0.0;     ///< Tr / 4, real part
   std::complex<double> raw_trace; ///< Tr
   bool satisfied = false;         ///< value < 1
};

inline TraceCondition trace_condition(const GammaSet& g, const TwoBodySpinOp& V, const FourVector& P)
{
   require_timelike(P);
   const FourVector unit = (1.0 / std::sqrt(P.square())) * P;
   const TwoBodySpinOp prod = slash1(g, unit) * slash2(g, unit) * V;
   TraceCondition t;
   t.raw_trace = trace16(prod);
   t.quarter_trace = trace16_normalized(prod).real();
   t.value = t.raw_trace.real() / 16.0;
   t.satisfied = t.value < 1.0;
   return t;
}

} // namespace tbdkit
