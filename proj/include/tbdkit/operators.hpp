#pragma once

// Two-Body Dirac operators for a fermion-antifermion pair at fixed total
// momentum eigenvalue P:
//
//   D1 = g1.p1 - m1 - (-g2.p2 + m2) V
//   D2 = g2.p2 + m2 + (g1.p1 + m1) V
//
// with p1 = P/2 + p, p2 = P/2 - p and p = i d/dx the relative momentum. The
// internal wave function is a finite sum of relative-energy modes
// exp(-i p0 x0) chi(x) on a periodic spatial grid, so the time part of p acts
// analytically and the spatial part spectrally.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tbdkit/grid.hpp"
#include "tbdkit/kinematics.hpp"
#include "tbdkit/potentials.hpp"
#include "tbdkit/spinor_algebra.hpp"

namespace tbdkit {

struct TwoBodyDiracSystem {
   MassPair masses;
   PotentialSpec potential;
   GammaSet gammas;
};

struct EnergyMode {
   double p0 = 0.0;
   SpinorField chi;
};

/// phi(x) = sum_modes exp(-i p0 x0) chi(x), tagged with the total momentum
/// eigenvalue P. Grid operations run in the c.m. frame P = (P0, 0, 0, 0).
class InternalField {
public:
   InternalField(FourVector P, Grid grid) : P_(P), grid_(std::move(grid))
   {
      require_timelike(P_);
      if (P_.x != 0.0 || P_.y != 0.0 || P_.z != 0.0)
         throw std::invalid_argument("grid fields are defined in the c.m. frame; boost P to (P0,0,0,0) first");
   }

   const FourVector& P() const { return P_; }
   const Grid& grid() const { return grid_; }
   const std::vector<EnergyMode>& modes() const { return modes_; }
   std::vector<EnergyMode>& modes() { return modes_; }

   void add_mode(double p0, SpinorField chi)
   {
      if (chi.size() != grid_.field_size()) throw std::invalid_argument("mode size does not match grid");
      modes_.push_back({p0, std::move(chi)});
   }

   /// Same P, grid and mode energies, all amplitudes zero.
   InternalField zeros_like() const
   {
      InternalField out(P_, grid_);
      for (const auto& m : modes_) out.add_mode(m.p0, SpinorField(m.chi.size()));
      return out;
   }

   /// sqrt(sum_modes sum_grid |chi|^2 dV); modes are treated as orthogonal.
   double norm() const
   {
      double acc = 0.0;
      for (const auto& m : modes_)
         for (const auto& v : m.chi) acc += std::norm(v);
      return std::sqrt(acc * grid_.cell_volume());
   }

   /// phi on the slice x0 = t.
   SpinorField slice(double t = 0.0) const
   {
      SpinorField out(grid_.field_size());
      for (const auto& m : modes_) {
         const std::complex<double> phase = std::exp(-I * m.p0 * t);
         for (std::size_t i = 0; i < out.size(); ++i) out[i] += phase * m.chi[i];
      }
      return out;
   }

   InternalField& operator+=(const InternalField& o)
   {
      check_compatible(o);
      for (std::size_t k = 0; k < modes_.size(); ++k)
         for (std::size_t i = 0; i < modes_[k].chi.size(); ++i) modes_[k].chi[i] += o.modes_[k].chi[i];
      return *this;
   }
   InternalField& operator-=(const InternalField& o)
   {
      check_compatible(o);
      for (std::size_t k = 0; k < modes_.size(); ++k)
         for (std::size_t i = 0; i < modes_[k].chi.size(); ++i) modes_[k].chi[i] -= o.modes_[k].chi[i];
      return *this;
   }
   InternalField& operator*=(std::complex<double> s)
   {
      for (auto& m : modes_)
         for (auto& v : m.chi) v *= s;
      return *this;
   }
   friend InternalField operator+(InternalField a, const InternalField& b) { return a += b; }
   friend InternalField operator-(InternalField a, const InternalField& b) { return a -= b; }

   void check_compatible(const InternalField& o) const
   {
      if (!grid_.same_as(o.grid_)) throw std::invalid_argument("fields live on different grids");
      if (!(P_ == o.P_)) throw std::invalid_argument("fields carry different total momenta");
      if (modes_.size() != o.modes_.size()) throw std::invalid_argument("fields carry different mode lists");
      for (std::size_t k = 0; k < modes_.size(); ++k)
         if (modes_[k].p0 != o.modes_[k].p0) throw std::invalid_argument("fields carry different mode energies");
   }

private:
   FourVector P_;
   Grid grid_;
   std::vector<EnergyMode> modes_;
};

enum class Particle { one, two };

namespace detail {

using Spin4x4 = Eigen::Matrix<cplx, 4, 4, Eigen::RowMajor>;

/// (M (x) 1) psi or (1 (x) M) psi for psi stored as a row-major 4x4 block.
inline void apply_on_particle(Particle which, const Mat4c& M, cplx* psi)
{
   Eigen::Map<Spin4x4> block(psi);
   if (which == Particle::one)
      block = (M * block).eval();
   else
      block = (block * M.transpose()).eval();
}

inline double minkowski_p(const FourVector& P, double p0, const Eigen::Vector3d& k, Particle which,
                          FourVector& out)
{
   const FourVector rel{p0, k.x(), k.y(), k.z()};
   out = which == Particle::one ? 0.5 * P + rel : 0.5 * P - rel;
   return out.square();
}

} // namespace detail

/// Values of V(x_perp^2 = -|x|^2, P^2) on the grid nodes.
inline std::vector<double> potential_on_grid(const PotentialSpec& spec, const Grid& grid, double P_sq)
{
   std::vector<double> out(grid.points());
   for (std::size_t i = 0; i < out.size(); ++i) out[i] = eval_V(spec, -grid.position(i).squaredNorm(), P_sq);
   return out;
}

/// dV/ds, s = -x_perp^2, so that d_k V = 2 x^k dV/ds in the c.m. frame.
inline double eval_dV_ds(const PotentialSpec& spec, double x_perp_sq, double P_sq)
{
   const double s = -x_perp_sq;
   const double v = eval_V(spec, x_perp_sq, P_sq);
   if (const auto* t = std::get_if<potential::TanhOfG>(&spec)) return (1.0 - v * v) * t->g.derivative(s);
   if (const auto* p = std::get_if<potential::Profile>(&spec)) return p->g.derivative(s);
   if (const auto* y = std::get_if<potential::YukawaTanh>(&spec)) {
      const double r = std::sqrt(s);
      const double a = yukawa_strength(*y, r);
      const double darg_dr = a * (y->mu + 1.0 / r) / (2.0 * std::sqrt(P_sq));
      return (1.0 - v * v) * darg_dr / (2.0 * r);
   }
   return 0.0;
}

/// (gamma_k . p_k + c) phi for particle k, p_1 = P/2 + p, p_2 = P/2 - p.
inline InternalField apply_dirac_part(const GammaSet& g, Particle which, double c, const InternalField& field)
{
   const Grid& grid = field.grid();
   InternalField out = field;
   for (auto& mode : out.modes()) {
      grid.forward(mode.chi);
      for (std::size_t pt = 0; pt < grid.points(); ++pt) {
         FourVector pk;
         detail::minkowski_p(field.P(), mode.p0, grid.wavevector(pt), which, pk);
         const Mat4c M = slash(g, pk) + c * Mat4c::Identity();
         detail::apply_on_particle(which, M, mode.chi.data() + pt * spin_dim);
      }
      grid.backward(mode.chi);
   }
   return out;
}

/// Pointwise multiplication by V(x_perp^2, P^2).
inline InternalField multiply_potential(const std::vector<double>& v_grid, const InternalField& field)
{
   InternalField out = field;
   for (auto& mode : out.modes())
      for (std::size_t pt = 0; pt < v_grid.size(); ++pt)
         for (int s = 0; s < spin_dim; ++s) mode.chi[pt * spin_dim + s] *= v_grid[pt];
   return out;
}

inline InternalField apply_D1(const TwoBodyDiracSystem& sys, const InternalField& field)
{
   const auto v = potential_on_grid(sys.potential, field.grid(), field.P().square());
   InternalField out = apply_dirac_part(sys.gammas, Particle::one, -sys.masses.m1, field);
   out += apply_dirac_part(sys.gammas, Particle::two, -sys.masses.m2, multiply_potential(v, field));
   return out;
}

inline InternalField apply_D2(const TwoBodyDiracSystem& sys, const InternalField& field)
{
   const auto v = potential_on_grid(sys.potential, field.grid(), field.P().square());
   InternalField out = apply_dirac_part(sys.gammas, Particle::two, sys.masses.m2, field);
   out += apply_dirac_part(sys.gammas, Particle::one, sys.masses.m1, multiply_potential(v, field));
   return out;
}

/// Fraction of spectral energy in the top third of the band, max over modes.
inline double spectral_tail_fraction(const InternalField& field)
{
   const Grid& grid = field.grid();
   double worst = 0.0;
   for (const auto& mode : field.modes()) {
      SpinorField hat = mode.chi;
      grid.forward(hat);
      double total = 0.0, tail = 0.0;
      for (std::size_t pt = 0; pt < grid.points(); ++pt) {
         double e = 0.0;
         for (int s = 0; s < spin_dim; ++s) e += std::norm(hat[pt * spin_dim + s]);
         total += e;
         if (grid.in_top_third(pt)) tail += e;
      }
      if (total > 0.0) worst = std::max(worst, tail / total);
   }
   return worst;
}

/// How the commutators [g_k.p_k, V] on the right-hand side are realised.
enum class CommutatorRoute {
   composed, ///< g.p (V psi) - V (g.p psi), both spectral
   analytic, ///< multiplication by +-i gamma^k d_k V from the closed-form gradient
};

struct CompatibilityResult {
   double residual = 0.0;   ///< ||[D1,D2]phi - rhs|| / ||phi||
   double lhs_norm = 0.0;   ///< ||[D1,D2]phi|| / ||phi||
   double spectral_tail = 0.0;
   bool aliasing_warning = false;
};

inline constexpr double aliasing_tail_threshold = 1e-16;

namespace detail {

/// [g_k.p_k, V] psi = s_k i gamma_k^j d_j V psi with s_1 = +1, s_2 = -1.
inline InternalField analytic_commutator(const TwoBodyDiracSystem& sys, Particle which, const InternalField& psi)
{
   const Grid& grid = psi.grid();
   const double P_sq = psi.P().square();
   const double sign = which == Particle::one ? 1.0 : -1.0;
   InternalField out = psi;
   for (std::size_t pt = 0; pt < grid.points(); ++pt) {
      const Eigen::Vector3d x = grid.position(pt);
      const double dvds = eval_dV_ds(sys.potential, -x.squaredNorm(), P_sq);
      Mat4c W = Mat4c::Zero();
      for (int k = 1; k <= 3; ++k) W += (2.0 * x(k - 1) * dvds) * sys.gammas[k];
      W *= sign * I;
      for (auto& mode : out.modes()) apply_on_particle(which, W, mode.chi.data() + pt * spin_dim);
   }
   return out;
}

} // namespace detail

/// Checks [D1,D2] phi = -[g1.p1, V] D1 phi + [g2.p2, V] D2 phi on the grid.
inline CompatibilityResult compatibility_residual(const TwoBodyDiracSystem& sys, const InternalField& field,
                                                  CommutatorRoute route = CommutatorRoute::composed)
{
   const auto v = potential_on_grid(sys.potential, field.grid(), field.P().square());
   const InternalField d1 = apply_D1(sys, field);
   const InternalField d2 = apply_D2(sys, field);
   const InternalField lhs = apply_D1(sys, d2) - apply_D2(sys, d1);

   auto commutator = [&](Particle which, const InternalField& psi) {
      if (route == CommutatorRoute::analytic) return detail::analytic_commutator(sys, which, psi);
      return apply_dirac_part(sys.gammas, which, 0.0, multiply_potential(v, psi)) -
             multiply_potential(v, apply_dirac_part(sys.gammas, which, 0.0, psi));
   };
   InternalField rhs = commutator(Particle::two, d2);
   rhs -= commutator(Particle::one, d1);

   const double scale = field.norm();
   if (scale == 0.0) throw std::invalid_argument("compatibility residual needs a nonzero field");
   CompatibilityResult out;
   out.lhs_norm = lhs.norm() / scale;
   out.residual = (lhs - rhs).norm() / scale;
   out.spectral_tail = spectral_tail_fraction(field);
   out.aliasing_warning = out.spectral_tail > aliasing_tail_threshold;
   return out;
}

/// P^mu dV/dx^mu by central differences along P for a potential given as a
/// function of the four-vectors (x, P).
template <class PotentialFn>
double directional_derivative_along_P(PotentialFn&& V, const FourVector& x, const FourVector& P, double h = 1e-5)
{
   const double scale = h / std::max(1.0, P.euclidean_norm());
   return (V(x + scale * P, P) - V(x - scale * P, P)) / (2.0 * scale);
}

/// Necessary condition on V: P^mu dV/dx^mu = 0 at every sampled (x, P).
template <class PotentialFn>
bool general_compatibility_check(PotentialFn&& V, const std::vector<std::pair<FourVector, FourVector>>& samples,
                                 double tolerance = 1e-9)
{
   return std::all_of(samples.begin(), samples.end(), [&](const auto& s) {
      return std::abs(directional_derivative_along_P(V, s.first, s.second)) <= tolerance;
   });
}

/// V(x, P) = eval_V(spec, x_perp(x,P)^2, P^2) as a callable of four-vectors.
inline auto covariant_potential(const PotentialSpec& spec)
{
   return [spec](const FourVector& x, const FourVector& P) {
      return eval_V(spec, x_perp(x, P).square(), P.square());
   };
}

// ---------------------------------------------------------------------------
// Plane-wave sector for constant V.

/// Spinor amplitude with the two particle momenta; psi = u exp(-i p1.x1 - i p2.x2).
struct PlaneWaveState {
   Vec16c u = Vec16c::Zero();
   FourVector p1, p2;

   FourVector P() const { return p1 + p2; }
   FourVector p() const { return 0.5 * (p1 - p2); }
};

inline double constant_value(const PotentialSpec& spec)
{
   if (std::holds_alternative<potential::Zero>(spec)) return 0.0;
   if (const auto* c = std::get_if<potential::Constant>(&spec)) return c->v;
   throw std::invalid_argument("plane-wave sector needs a zero or constant potential");
}

using StackedMatrix = Eigen::Matrix<cplx, 32, 16>;

/// [M1; M2] with M1 = g1.p1 - m1 + (g2.p2 - m2) v and M2 = g2.p2 + m2 + (g1.p1 + m1) v.
inline StackedMatrix stacked_matrix(const TwoBodyDiracSystem& sys, const FourVector& p1, const FourVector& p2)
{
   const double v = constant_value(sys.potential);
   const Mat16c id = Mat16c::Identity();
   const Mat16c s1 = slash1(sys.gammas, p1).m;
   const Mat16c s2 = slash2(sys.gammas, p2).m;
   StackedMatrix out;
   out.topRows<16>() = s1 - sys.masses.m1 * id + v * (s2 - sys.masses.m2 * id);
   out.bottomRows<16>() = s2 + sys.masses.m2 * id + v * (s1 + sys.masses.m1 * id);
   return out;
}

inline double min_singular_value(const StackedMatrix& m)
{
   Eigen::JacobiSVD<StackedMatrix> svd(m);
   return svd.singularValues()(15);
}

/// Smallest singular value of the stacked system at relative energy p0.
inline double dispersion_sigma(const TwoBodyDiracSystem& sys, const FourVector& P, const Eigen::Vector3d& p_spatial,
                               double p0)
{
   const FourVector rel{p0, p_spatial.x(), p_spatial.y(), p_spatial.z()};
   return min_singular_value(stacked_matrix(sys, 0.5 * P + rel, 0.5 * P - rel));
}

/// Right singular vectors of the stacked system with singular value below `tol`.
inline std::vector<Vec16c> null_space(const StackedMatrix& m, double tol = 1e-6)
{
   Eigen::JacobiSVD<StackedMatrix> svd(m, Eigen::ComputeFullV);
   std::vector<Vec16c> out;
   for (int k = 0; k < 16; ++k)
      if (svd.singularValues()(k) < tol) out.emplace_back(svd.matrixV().col(k));
   return out;
}

struct ScanWindow {
   double lo = -1.0;
   double hi = 1.0;
   double step = 1e-3;
};

struct PlaneWaveRoot {
   double p0 = 0.0;
   double sigma_min = 0.0;
   std::vector<Vec16c> null_basis;
};

inline constexpr double root_sigma_threshold = 1e-8;

/// Relative energies p0 at which the two constant-V equations share a null
/// space. Local minima of the smallest singular value found on the scan are
/// refined by golden-section search to a bracket of 1e-12.
inline std::vector<PlaneWaveRoot> plane_wave_solutions(const TwoBodyDiracSystem& sys, const FourVector& P,
                                                       const Eigen::Vector3d& p_spatial, const ScanWindow& window)
{
   const double v = constant_value(sys.potential);
   if (!(std::abs(v) < 1.0)) throw std::invalid_argument("plane-wave solver needs |v| < 1");
   require_timelike(P);
   if (!(window.step > 0.0) || !(window.hi > window.lo)) throw std::invalid_argument("bad scan window");

   auto sigma = [&](double p0) { return dispersion_sigma(sys, P, p_spatial, p0); };
   const auto samples = static_cast<std::size_t>(std::ceil((window.hi - window.lo) / window.step)) + 1;
   std::vector<double> xs(samples), fs(samples);
   for (std::size_t i = 0; i < samples; ++i) {
      xs[i] = std::min(window.hi, window.lo + static_cast<double>(i) * window.step);
      fs[i] = sigma(xs[i]);
   }

   std::vector<PlaneWaveRoot> roots;
   for (std::size_t i = 0; i < samples; ++i) {
      const bool left_ok = i == 0 || fs[i] <= fs[i - 1];
      const bool right_ok = i + 1 == samples || fs[i] < fs[i + 1];
      if (!left_ok || !right_ok) continue;
      double a = xs[i == 0 ? 0 : i - 1];
      double b = xs[i + 1 == samples ? i : i + 1];
      const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
      double c = b - invphi * (b - a), d = a + invphi * (b - a);
      double fc = sigma(c), fd = sigma(d);
      while (b - a > 1e-12) {
         if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - invphi * (b - a);
            fc = sigma(c);
         } else {
            a = c; c = d; fc = fd;
            d = a + invphi * (b - a);
            fd = sigma(d);
         }
      }
      const double x = 0.5 * (a + b);
      const double fx = sigma(x);
      if (fx >= root_sigma_threshold) continue;
      if (!roots.empty() && std::abs(roots.back().p0 - x) < 1e-9) continue;
      const FourVector rel{x, p_spatial.x(), p_spatial.y(), p_spatial.z()};
      roots.push_back({x, fx, null_space(stacked_matrix(sys, 0.5 * P + rel, 0.5 * P - rel))});
   }
   return roots;
}

/// Masses of the decoupled free equations equivalent to the constant-v
/// system: D1 - v D2 and D2 - v D1 are (1 - v^2)(g1.p1 - M1) and (1 - v^2)(g2.p2 + M2).
inline std::pair<double, double> effective_masses(const TwoBodyDiracSystem& sys)
{
   const double v = constant_value(sys.potential);
   if (!(std::abs(v) < 1.0)) throw std::invalid_argument("effective masses need |v| < 1");
   const double m1 = sys.masses.m1, m2 = sys.masses.m2;
   const double d = 1.0 - v * v;
   return {(m1 * (1.0 + v * v) + 2.0 * v * m2) / d, (m2 * (1.0 + v * v) + 2.0 * v * m1) / d};
}

/// Exact constant-v solution with the given spatial momenta (positive
/// energies on the effective mass shells). `coefficients` combine the
/// four-dimensional null space; the result is normalised.
inline PlaneWaveState constant_v_solution(const TwoBodyDiracSystem& sys, const Eigen::Vector3d& k1,
                                          const Eigen::Vector3d& k2,
                                          const Eigen::Vector4cd& coefficients = Eigen::Vector4cd(1, 0, 0, 0))
{
   const auto [M1, M2] = effective_masses(sys);
   PlaneWaveState s;
   s.p1 = {std::sqrt(M1 * M1 + k1.squaredNorm()), k1.x(), k1.y(), k1.z()};
   s.p2 = {std::sqrt(M2 * M2 + k2.squaredNorm()), k2.x(), k2.y(), k2.z()};
   const auto basis = null_space(stacked_matrix(sys, s.p1, s.p2), 1e-8);
   if (basis.size() != 4) throw std::runtime_error("unexpected null-space dimension for constant-v solution");
   for (int k = 0; k < 4; ++k) s.u += coefficients(k) * basis[static_cast<std::size_t>(k)];
   const double nrm = s.u.norm();
   if (nrm == 0.0) throw std::invalid_argument("null-space coefficients vanish");
   s.u /= nrm;
   return s;
}

/// Plane-wave state solving only the first (which = one) or only the second
/// equation. The other particle's momentum is fixed; this particle gets the
/// spatial momentum k and the mass shell on which the chosen row is singular.
inline PlaneWaveState single_equation_state(const TwoBodyDiracSystem& sys, Particle which, const FourVector& other,
                                            const Eigen::Vector3d& k,
                                            const Eigen::Vector4cd& coefficients = Eigen::Vector4cd(1, 0, 0, 0))
{
   const double v = constant_value(sys.potential);
   const double m1 = sys.masses.m1, m2 = sys.masses.m2;
   const double w = std::sqrt(other.square());
   if (!(other.square() > 0.0)) throw std::invalid_argument("single-equation state needs a timelike partner momentum");
   PlaneWaveState s;
   // eigenvalues of the slashes are +-sqrt(p^2); pick the partner's + branch
   const double a = which == Particle::one ? m1 - v * (w - m2) : -m2 - v * (w + m1);
   const FourVector mine{std::sqrt(a * a + k.squaredNorm()), k.x(), k.y(), k.z()};
   s.p1 = which == Particle::one ? mine : other;
   s.p2 = which == Particle::one ? other : mine;
   const StackedMatrix m = stacked_matrix(sys, s.p1, s.p2);
   const Mat16c row = which == Particle::one ? Mat16c(m.topRows<16>()) : Mat16c(m.bottomRows<16>());
   Eigen::JacobiSVD<Mat16c> svd(row, Eigen::ComputeFullV);
   const auto& sv = svd.singularValues();
   if (!(sv(12) < 1e-8)) throw std::runtime_error("unexpected null-space dimension for single-equation state");
   for (int j = 0; j < 4; ++j) s.u += coefficients(j) * svd.matrixV().col(12 + j);
   const double nrm = s.u.norm();
   if (nrm == 0.0) throw std::invalid_argument("null-space coefficients vanish");
   s.u /= nrm;
   return s;
}

/// max(||M1 u||, ||M2 u||) / ||u||
inline double solution_residual(const TwoBodyDiracSystem& sys, const PlaneWaveState& s)
{
   const StackedMatrix m = stacked_matrix(sys, s.p1, s.p2);
   const Eigen::Matrix<cplx, 32, 1> r = m * s.u;
   return std::max(r.head<16>().norm(), r.tail<16>().norm()) / s.u.norm();
}

} // namespace tbdkit
