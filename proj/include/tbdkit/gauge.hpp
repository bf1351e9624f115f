#pragma once

// Phase transformations psi -> exp(-i theta) psi and their effect on the
// interacting norm. A phase depending only on the relative coordinate leaves
// the total momentum and the kernel alone; a phase a.X shifts P by a, and the
// kernel is then evaluated at a different total momentum.

#include <cmath>
#include <complex>
#include <stdexcept>

#include "tbdkit/operators.hpp"
#include "tbdkit/scalar_product.hpp"

namespace tbdkit {

enum class ThetaKind { relative_only, total_dependent };

struct GaugeReport {
   ThetaKind kind = ThetaKind::relative_only;
   FourVector P_before, P_after;
   std::complex<double> kernel_before; ///< <phi, phi> with the kernel at P
   std::complex<double> kernel_after;  ///< same after the transformation
   double difference = 0.0;
   bool invariant = false;
};

/// theta(x) = constant + c.x applied to the internal field: every mode picks up
/// exp(-i constant) exp(i c.x) on the spatial grid and its relative energy
/// shifts by c0.
inline InternalField apply_relative_phase(const InternalField& field, double constant, const FourVector& c)
{
   InternalField out(field.P(), field.grid());
   const Grid& grid = field.grid();
   for (const auto& mode : field.modes()) {
      SpinorField chi = mode.chi;
      for (std::size_t pt = 0; pt < grid.points(); ++pt) {
         const Eigen::Vector3d x = grid.position(pt);
         const std::complex<double> phase = std::exp(-I * (constant - (c.x * x.x() + c.y * x.y() + c.z * x.z())));
         for (int s = 0; s < spin_dim; ++s) chi[pt * spin_dim + s] *= phase;
      }
      out.add_mode(mode.p0 + c.t, std::move(chi));
   }
   return out;
}

/// theta = a.X: the internal field is unchanged and P becomes P + a.
inline InternalField apply_total_phase(const InternalField& field, const FourVector& a)
{
   InternalField out(field.P() + a, field.grid());
   for (const auto& mode : field.modes()) out.add_mode(mode.p0, mode.chi);
   return out;
}

struct GaugeParameters {
   double constant = 0.0; ///< relative_only: constant phase
   FourVector c;          ///< relative_only: theta = constant + c.x
   FourVector a;          ///< total_dependent: theta = a.X
   double tolerance = 1e-10;
};

inline GaugeReport gauge_check(const TwoBodyDiracSystem& sys, KernelFlavor flavor, const InternalField& field,
                               ThetaKind kind, const GaugeParameters& params)
{
   GaugeReport r;
   r.kind = kind;
   r.P_before = field.P();
   const NormKernel before = build_kernel(flavor, sys.potential, field.P(), field.grid(), sys.gammas);
   r.kernel_before = interacting_inner_product(before, field, field);
   const InternalField moved =
      kind == ThetaKind::relative_only ? apply_relative_phase(field, params.constant, params.c)
                                       : apply_total_phase(field, params.a);
   r.P_after = moved.P();
   const NormKernel after = build_kernel(flavor, sys.potential, moved.P(), moved.grid(), sys.gammas);
   r.kernel_after = interacting_inner_product(after, moved, moved);
   r.difference = std::abs(r.kernel_after - r.kernel_before);
   r.invariant = r.difference <= params.tolerance * std::max(1.0, std::abs(r.kernel_before));
   return r;
}

} // namespace tbdkit
