#pragma once

// Dirac matrices and their two-body lifts. The 16-dimensional spin space is
// ordered as (particle-1 index) * 4 + (particle-2 index), i.e. the Kronecker
// convention A (x) B.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tbdkit/kinematics.hpp"

namespace tbdkit {

using cplx = std::complex<double>;
using Mat4c = Eigen::Matrix<cplx, 4, 4>;
using Mat16c = Eigen::Matrix<cplx, 16, 16>;
using Vec16c = Eigen::Matrix<cplx, 16, 1>;

inline constexpr cplx I{0.0, 1.0};

enum class Representation { dirac, weyl };

inline Representation parse_representation(std::string_view tag)
{
   if (tag == "dirac") return Representation::dirac;
   if (tag == "weyl" || tag == "chiral") return Representation::weyl;
   throw std::invalid_argument("unknown gamma representation: " + std::string(tag));
}

inline std::string_view to_string(Representation r)
{
   return r == Representation::dirac ? "dirac" : "weyl";
}

/// The four gamma matrices of one representation, metric diag(1,-1,-1,-1).
struct GammaSet {
   Representation representation = Representation::dirac;
   std::array<Mat4c, 4> gamma;

   const Mat4c& operator[](int mu) const
   {
      if (mu < 0 || mu > 3) throw std::out_of_range("gamma index must be in 0..3");
      return gamma[static_cast<std::size_t>(mu)];
   }
};

/// 16x16 operator on the two-particle spinor space.
struct TwoBodySpinOp {
   Mat16c m = Mat16c::Zero();

   TwoBodySpinOp() = default;
   explicit TwoBodySpinOp(const Mat16c& mat) : m(mat) {}

   static TwoBodySpinOp identity() { return TwoBodySpinOp(Mat16c::Identity()); }

   friend TwoBodySpinOp operator*(const TwoBodySpinOp& a, const TwoBodySpinOp& b)
   {
      return TwoBodySpinOp(a.m * b.m);
   }
   friend TwoBodySpinOp operator+(const TwoBodySpinOp& a, const TwoBodySpinOp& b)
   {
      return TwoBodySpinOp(a.m + b.m);
   }
   friend TwoBodySpinOp operator-(const TwoBodySpinOp& a, const TwoBodySpinOp& b)
   {
      return TwoBodySpinOp(a.m - b.m);
   }
   friend TwoBodySpinOp operator*(cplx s, const TwoBodySpinOp& a) { return TwoBodySpinOp(s * a.m); }
   friend TwoBodySpinOp operator*(double s, const TwoBodySpinOp& a) { return TwoBodySpinOp(s * a.m); }
};

namespace detail {

inline Eigen::Matrix2cd pauli(int k)
{
   Eigen::Matrix2cd s;
   switch (k) {
   case 1: s << 0.0, 1.0, 1.0, 0.0; break;
   case 2: s << 0.0, -I, I, 0.0; break;
   case 3: s << 1.0, 0.0, 0.0, -1.0; break;
   default: throw std::out_of_range("pauli index");
   }
   return s;
}

inline Mat4c kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b)
{
   Mat4c out;
   for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
         out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
   return out;
}

} // namespace detail

inline GammaSet build_gammas(Representation rep)
{
   using detail::kron2;
   using detail::pauli;
   GammaSet g;
   g.representation = rep;
   Eigen::Matrix2cd outer0, outerk;
   if (rep == Representation::dirac)
      outer0 << 1.0, 0.0, 0.0, -1.0;
   else
      outer0 << 0.0, 1.0, 1.0, 0.0;
   outerk << 0.0, 1.0, -1.0, 0.0;
   g.gamma[0] = kron2(outer0, Eigen::Matrix2cd::Identity());
   for (int k = 1; k <= 3; ++k)
      g.gamma[static_cast<std::size_t>(k)] = kron2(outerk, pauli(k));
   return g;
}

inline GammaSet build_gammas(std::string_view tag) { return build_gammas(parse_representation(tag)); }

inline Mat16c kron(const Mat4c& a, const Mat4c& b)
{
   Mat16c out;
   for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
         out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
   return out;
}

/// gamma^mu acting on particle 1: gamma^mu (x) 1.
inline TwoBodySpinOp lift1(const GammaSet& g, int mu)
{
   return TwoBodySpinOp(kron(g[mu], Mat4c::Identity()));
}

/// gamma^nu acting on particle 2: 1 (x) gamma^nu.
inline TwoBodySpinOp lift2(const GammaSet& g, int nu)
{
   return TwoBodySpinOp(kron(Mat4c::Identity(), g[nu]));
}

/// Feynman slash on a single 4-spinor: q0 g^0 - q.g
inline Mat4c slash(const GammaSet& g, const FourVector& q)
{
   return q.t * g[0] - q.x * g[1] - q.y * g[2] - q.z * g[3];
}

inline TwoBodySpinOp slash1(const GammaSet& g, const FourVector& q)
{
   return TwoBodySpinOp(kron(slash(g, q), Mat4c::Identity()));
}

inline TwoBodySpinOp slash2(const GammaSet& g, const FourVector& q)
{
   return TwoBodySpinOp(kron(Mat4c::Identity(), slash(g, q)));
}

/// gamma_1^0 gamma_2^0, the Dirac adjoint weight of the two-body space.
inline Mat16c beta12(const GammaSet& g) { return kron(g[0], g[0]); }

inline cplx trace16(const TwoBodySpinOp& op) { return op.m.trace(); }

/// Trace divided by 4 (the 1/4 Tr convention used for the trace condition).
inline cplx trace16_normalized(const TwoBodySpinOp& op) { return op.m.trace() / 4.0; }

/// Max abs entry deviation of the Clifford relations and of
/// (gamma^mu)^dagger = gamma^0 gamma^mu gamma^0.
inline double clifford_defect(const GammaSet& g)
{
   double worst = 0.0;
   for (int mu = 0; mu < 4; ++mu) {
      for (int nu = 0; nu < 4; ++nu) {
         const Mat4c anti = g[mu] * g[nu] + g[nu] * g[mu];
         const double metric = (mu != nu) ? 0.0 : (mu == 0 ? 2.0 : -2.0);
         worst = std::max(worst, (anti - metric * Mat4c::Identity()).cwiseAbs().maxCoeff());
      }
      const Mat4c herm = g[mu].adjoint() - g[0] * g[mu] * g[0];
      worst = std::max(worst, herm.cwiseAbs().maxCoeff());
   }
   return worst;
}

} // namespace tbdkit
