#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace tbdkit {

/// Contravariant four-vector (t, x, y, z) in natural units.
struct FourVector {
   double t = 0.0;
   double x = 0.0;
   double y = 0.0;
   double z = 0.0;

   constexpr double operator[](int mu) const
   {
      switch (mu) {
      case 0: return t;
      case 1: return x;
      case 2: return y;
      default: return z;
      }
   }

   /// Minkowski product, metric diag(1,-1,-1,-1).
   constexpr double dot(const FourVector& o) const { return t * o.t - x * o.x - y * o.y - z * o.z; }
   constexpr double square() const { return dot(*this); }
   /// Euclidean norm of the components; used only for tolerance scaling.
   double euclidean_norm() const { return std::sqrt(t * t + x * x + y * y + z * z); }
   double spatial_norm() const { return std::sqrt(x * x + y * y + z * z); }

   Eigen::Vector4d as_vector() const { return {t, x, y, z}; }
   static FourVector from_vector(const Eigen::Vector4d& v) { return {v(0), v(1), v(2), v(3)}; }

   friend constexpr FourVector operator+(const FourVector& a, const FourVector& b)
   {
      return {a.t + b.t, a.x + b.x, a.y + b.y, a.z + b.z};
   }
   friend constexpr FourVector operator-(const FourVector& a, const FourVector& b)
   {
      return {a.t - b.t, a.x - b.x, a.y - b.y, a.z - b.z};
   }
   friend constexpr FourVector operator*(double s, const FourVector& a)
   {
      return {s * a.t, s * a.x, s * a.y, s * a.z};
   }
   friend constexpr FourVector operator-(const FourVector& a) { return {-a.t, -a.x, -a.y, -a.z}; }
   friend constexpr bool operator==(const FourVector&, const FourVector&) = default;
};

/// Lowers the index: q_mu = g_{mu nu} q^nu.
constexpr FourVector lower(const FourVector& q) { return {q.t, -q.x, -q.y, -q.z}; }

struct MassPair {
   double m1;
   double m2;

   MassPair(double a, double b) : m1(a), m2(b)
   {
      if (!(m1 > 0.0) || !(m2 > 0.0)) throw std::invalid_argument("masses must be positive");
   }
};

/// Particle positions and momenta with the total/relative combinations
/// x = x1 - x2, X = (x1 + x2)/2, p = (p1 - p2)/2, P = p1 + p2.
struct TwoBodyKinematics {
   FourVector x1, x2, p1, p2;

   FourVector relative_position() const { return x1 - x2; }
   FourVector center() const { return 0.5 * (x1 + x2); }
   FourVector relative_momentum() const { return 0.5 * (p1 - p2); }
   FourVector total_momentum() const { return p1 + p2; }

   static TwoBodyKinematics from_total(const FourVector& X, const FourVector& x, const FourVector& P,
                                       const FourVector& p)
   {
      return {X + 0.5 * x, X - 0.5 * x, 0.5 * P + p, 0.5 * P - p};
   }
};

class SingularProjector : public std::domain_error {
public:
   using std::domain_error::domain_error;
};

inline void require_timelike(const FourVector& P)
{
   const double scale = P.euclidean_norm();
   if (!(P.square() > 1e-10 * scale * scale))
      throw SingularProjector("projector needs a timelike total momentum");
}

/// pi^mu_nu = delta^mu_nu - P^mu P_nu / (P.P), acting on contravariant vectors.
inline Eigen::Matrix4d projector(const FourVector& P)
{
   require_timelike(P);
   const Eigen::Vector4d up = P.as_vector();
   const Eigen::Vector4d down = lower(P).as_vector();
   return Eigen::Matrix4d::Identity() - up * down.transpose() / P.square();
}

inline FourVector x_perp(const FourVector& x, const FourVector& P)
{
   require_timelike(P);
   return x - (x.dot(P) / P.square()) * P;
}

/// Strictly spacelike separation of the two events.
inline bool is_spacelike_configuration(const FourVector& x1, const FourVector& x2)
{
   return (x1 - x2).square() < 0.0;
}

/// Pure boost with rapidity `eta` along spatial axis 1, 2 or 3.
inline Eigen::Matrix4d boost(int axis, double eta)
{
   if (axis < 1 || axis > 3) throw std::out_of_range("boost axis must be 1, 2 or 3");
   Eigen::Matrix4d L = Eigen::Matrix4d::Identity();
   L(0, 0) = L(axis, axis) = std::cosh(eta);
   L(0, axis) = L(axis, 0) = std::sinh(eta);
   return L;
}

inline FourVector apply(const Eigen::Matrix4d& L, const FourVector& v)
{
   return FourVector::from_vector(L * v.as_vector());
}

/// Boost taking the timelike P to its rest frame (+-sqrt(P.P), 0, 0, 0).
inline Eigen::Matrix4d rest_frame_boost(const FourVector& P)
{
   require_timelike(P);
   const double m = std::sqrt(P.square());
   const Eigen::Vector3d beta = Eigen::Vector3d(P.x, P.y, P.z) / P.t;
   const double b2 = beta.squaredNorm();
   if (b2 == 0.0) return Eigen::Matrix4d::Identity();
   const double gamma = std::abs(P.t) / m;
   Eigen::Matrix4d L = Eigen::Matrix4d::Identity();
   L(0, 0) = gamma;
   L.block<1, 3>(0, 1) = -gamma * beta.transpose();
   L.block<3, 1>(1, 0) = -gamma * beta;
   L.block<3, 3>(1, 1) += (gamma - 1.0) * beta * beta.transpose() / b2;
   return L;
}

} // namespace tbdkit
