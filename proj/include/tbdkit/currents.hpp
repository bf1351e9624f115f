#pragma once

// Tensor currents j^{mu nu}[a, b] = bar(psi_a) g1^mu g2^nu psi_b for plane-wave
// states psi = u exp(-i p1.x1 - i p2.x2). Every current is then a coefficient
// matrix times exp(i q1.x1 + i q2.x2) with q_k = p_k[a] - p_k[b], and the
// divergences, defects and Green's-function completion are closed forms.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "tbdkit/kinematics.hpp"
#include "tbdkit/operators.hpp"
#include "tbdkit/potentials.hpp"
#include "tbdkit/spinor_algebra.hpp"

namespace tbdkit {

using Mat4cd = Eigen::Matrix4cd;
using Vec4cd = Eigen::Vector4cd;

/// coefficients(mu, nu) * exp(i q1.x1 + i q2.x2)
struct PlaneWaveCurrent {
   Mat4cd coefficients = Mat4cd::Zero();
   FourVector q1, q2;
   double epsilon = 0.0;

   cplx evaluate(int mu, int nu, const FourVector& x1, const FourVector& x2) const
   {
      return coefficients(mu, nu) * std::exp(I * (q1.dot(x1) + q2.dot(x2)));
   }

   friend PlaneWaveCurrent operator+(PlaneWaveCurrent a, const PlaneWaveCurrent& b)
   {
      if (!(a.q1 == b.q1) || !(a.q2 == b.q2)) throw std::invalid_argument("currents carry different phases");
      a.coefficients += b.coefficients;
      a.epsilon = std::max(a.epsilon, b.epsilon);
      return a;
   }
};

/// Dirac adjoint on the two-body space: bar(u) = u^dagger g1^0 g2^0.
inline Eigen::Matrix<cplx, 1, 16> adjoint_bar(const GammaSet& g, const Vec16c& u)
{
   return u.adjoint() * beta12(g);
}

inline PlaneWaveCurrent j_free(const GammaSet& g, const PlaneWaveState& a, const PlaneWaveState& b)
{
   PlaneWaveCurrent j;
   const auto ubar = adjoint_bar(g, a.u);
   for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) j.coefficients(mu, nu) = (ubar * (lift1(g, mu).m * lift2(g, nu).m) * b.u)(0);
   j.q1 = a.p1 - b.p1;
   j.q2 = a.p2 - b.p2;
   return j;
}

/// d_{1,mu} j^{mu nu}
inline Vec4cd divergence1(const PlaneWaveCurrent& j)
{
   const FourVector q = lower(j.q1);
   Vec4cd out;
   for (int nu = 0; nu < 4; ++nu) {
      cplx acc = 0.0;
      for (int mu = 0; mu < 4; ++mu) acc += q[mu] * j.coefficients(mu, nu);
      out(nu) = I * acc;
   }
   return out;
}

/// d_{2,nu} j^{mu nu}
inline Vec4cd divergence2(const PlaneWaveCurrent& j)
{
   const FourVector q = lower(j.q2);
   Vec4cd out;
   for (int mu = 0; mu < 4; ++mu) {
      cplx acc = 0.0;
      for (int nu = 0; nu < 4; ++nu) acc += q[nu] * j.coefficients(mu, nu);
      out(mu) = I * acc;
   }
   return out;
}

/// Divergences of the free current with one equation of motion substituted
/// (the first for d_1, the second for d_2). For constant v the mass terms
/// cancel and what survives is
///   d_1 j^{. nu} = -i v bar(u_a) [g2.p2a g2^nu - g2^nu g2.p2b] u_b
///   d_2 j^{mu .} = -i v bar(u_a) [g1.p1a g1^mu - g1^mu g1.p1b] u_b
/// On joint solutions both vanish: the constant-v pair is equivalent to two
/// free equations with shifted masses.
inline std::array<Vec4cd, 2> claim1_surviving_terms(const TwoBodyDiracSystem& sys, const PlaneWaveState& a,
                                                    const PlaneWaveState& b)
{
   const double v = constant_value(sys.potential);
   const GammaSet& g = sys.gammas;
   const auto ubar = adjoint_bar(g, a.u);
   const Mat16c s2a = slash2(g, a.p2).m, s2b = slash2(g, b.p2).m;
   const Mat16c s1a = slash1(g, a.p1).m, s1b = slash1(g, b.p1).m;
   std::array<Vec4cd, 2> out;
   for (int k = 0; k < 4; ++k) {
      const Mat16c g2 = lift2(g, k).m, g1 = lift1(g, k).m;
      out[0](k) = -I * v * (ubar * (s2a * g2 - g2 * s2b) * b.u)(0);
      out[1](k) = -I * v * (ubar * (s1a * g1 - g1 * s1b) * b.u)(0);
   }
   return out;
}

class NotASolution : public std::invalid_argument {
public:
   using std::invalid_argument::invalid_argument;
};

struct DefectFields {
   Vec4cd F1 = Vec4cd::Zero(); ///< F1^nu = d_{1,mu} j^{mu nu}
   Vec4cd F2 = Vec4cd::Zero(); ///< F2^mu = d_{2,nu} j^{mu nu}
   cplx F = 0.0;               ///< d_{1,mu} d_{2,nu} j^{mu nu}
   FourVector q1, q2;

   /// |d_2.F1 - F| and |d_1.F2 - F|, both of which vanish identically.
   double mixed_consistency() const
   {
      const FourVector l1 = lower(q1), l2 = lower(q2);
      cplx via1 = 0.0, via2 = 0.0;
      for (int k = 0; k < 4; ++k) {
         via1 += I * l2[k] * F1(k);
         via2 += I * l1[k] * F2(k);
      }
      return std::max(std::abs(via1 - F), std::abs(via2 - F));
   }
};

inline constexpr double solution_tolerance = 1e-8;

/// Divergences of an arbitrary plane-wave current, no equations assumed.
inline DefectFields defects_of_current(const PlaneWaveCurrent& j)
{
   DefectFields d;
   d.q1 = j.q1;
   d.q2 = j.q2;
   d.F1 = divergence1(j);
   d.F2 = divergence2(j);
   const FourVector l1 = lower(j.q1), l2 = lower(j.q2);
   for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) d.F -= l1[mu] * l2[nu] * j.coefficients(mu, nu);
   return d;
}

inline DefectFields defects(const TwoBodyDiracSystem& sys, const PlaneWaveState& a, const PlaneWaveState& b)
{
   if (solution_residual(sys, a) > solution_tolerance || solution_residual(sys, b) > solution_tolerance)
      throw NotASolution("defects need states that solve both equations");
   return defects_of_current(j_free(sys.gammas, a, b));
}

enum class GreenChoice { advanced, retarded };

class GreenSingularity : public std::domain_error {
public:
   using std::domain_error::domain_error;
};

/// Fourier multiplier of the Green's function (box G = delta) acting on
/// exp(i q.x): -1 / (q^2 + 2 i q0 eps) for advanced, -1 / (q^2 - 2 i q0 eps)
/// for retarded.
inline cplx green_multiplier(const FourVector& q, GreenChoice choice, double epsilon)
{
   const double sign = choice == GreenChoice::advanced ? 1.0 : -1.0;
   const cplx den = q.square() + sign * 2.0 * I * q.t * epsilon;
   if (std::abs(den) == 0.0) throw GreenSingularity("Green's function evaluated on k^2 = 0; use epsilon > 0");
   return -1.0 / den;
}

/// Completion j_add with d_1.j_add = -F1 and d_2.j_add = -F2 in the limit eps -> 0:
///   j_add = -d1^mu (G1 F1^nu) - d2^nu (G2 F2^mu) + d1^mu d2^nu (G1 G2 F)
inline PlaneWaveCurrent j_add(const DefectFields& d, GreenChoice choice, double epsilon)
{
   if (epsilon < 0.0) throw std::invalid_argument("epsilon must be nonnegative");
   PlaneWaveCurrent j;
   j.q1 = d.q1;
   j.q2 = d.q2;
   j.epsilon = epsilon;
   const bool has1 = d.F1.cwiseAbs().maxCoeff() > 0.0;
   const bool has2 = d.F2.cwiseAbs().maxCoeff() > 0.0;
   const cplx G1 = has1 || d.F != 0.0 ? green_multiplier(d.q1, choice, epsilon) : 0.0;
   const cplx G2 = has2 || d.F != 0.0 ? green_multiplier(d.q2, choice, epsilon) : 0.0;
   for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu)
         j.coefficients(mu, nu) = -I * d.q1[mu] * G1 * d.F1(nu) - I * d.q2[nu] * G2 * d.F2(mu) -
                                  d.q1[mu] * d.q2[nu] * G1 * G2 * d.F;
   return j;
}

/// Polynomial (Neville) extrapolation of samples f(eps_k) to eps = 0.
template <class T>
T extrapolate_to_zero(const std::vector<double>& eps, const std::vector<T>& values)
{
   if (eps.size() != values.size() || eps.empty()) throw std::invalid_argument("extrapolation needs matching samples");
   std::vector<T> p = values;
   const std::size_t n = eps.size();
   for (std::size_t level = 1; level < n; ++level)
      for (std::size_t i = 0; i + level < n; ++i)
         p[i] = (eps[i + level] * p[i] - eps[i] * p[i + 1]) / (eps[i + level] - eps[i]);
   return p[0];
}

/// j_add extrapolated to eps -> 0 from a finite-eps sequence.
inline PlaneWaveCurrent j_add_extrapolated(const DefectFields& d, GreenChoice choice, const std::vector<double>& eps)
{
   std::vector<Mat4cd> samples;
   for (double e : eps) {
      if (!(e > 0.0)) throw std::invalid_argument("extrapolation sequence needs epsilon > 0");
      samples.push_back(j_add(d, choice, e).coefficients);
   }
   PlaneWaveCurrent j;
   j.q1 = d.q1;
   j.q2 = d.q2;
   j.coefficients = extrapolate_to_zero(eps, samples);
   return j;
}

struct ConservationReport {
   double max_divergence1 = 0.0;
   double max_divergence2 = 0.0;
   double tolerance = 0.0;
   bool passed = false;
};

inline ConservationReport verify_conservation(const PlaneWaveCurrent& j, double tolerance)
{
   ConservationReport r;
   r.max_divergence1 = divergence1(j).cwiseAbs().maxCoeff();
   r.max_divergence2 = divergence2(j).cwiseAbs().maxCoeff();
   r.tolerance = tolerance;
   r.passed = r.max_divergence1 <= tolerance && r.max_divergence2 <= tolerance;
   return r;
}

/// Energy-difference term of the equal-time product between P and P'
/// eigenfunctions in the c.m. frame:
///   (P0' + P0) (V(P0' + i eps) - V(P0 - i eps)) / (P0' - P0 + 2 i eps).
inline cplx energy_difference_term(const PotentialSpec& spec, double x_perp_sq, double P0, double P0_prime,
                                   double epsilon)
{
   const cplx num = eval_V_at_energy(spec, x_perp_sq, P0_prime + I * epsilon) -
                    eval_V_at_energy(spec, x_perp_sq, P0 - I * epsilon);
   const cplx den = P0_prime - P0 + 2.0 * I * epsilon;
   if (std::abs(den) == 0.0) throw GreenSingularity("energy term needs epsilon > 0 at P = P'");
   return (P0_prime + P0) * num / den;
}

/// eps -> 0 limit of the energy term at P = P' from a finite-eps sequence;
/// the limit is 4 P0^2 dV/d(P^2).
inline double energy_term_limit(const PotentialSpec& spec, double x_perp_sq, double P0, const std::vector<double>& eps)
{
   std::vector<cplx> samples;
   for (double e : eps) samples.push_back(energy_difference_term(spec, x_perp_sq, P0, P0, e));
   return extrapolate_to_zero(eps, samples).real();
}

} // namespace tbdkit
