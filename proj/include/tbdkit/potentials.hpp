#pragma once

// Scalar potential family V(x_perp^2, P^2). Every variant is a real number times
// the 16x16 identity, so the Dirac-adjoint hermiticity condition and the
// fermion-antifermion exchange symmetry hold by construction.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tbdkit {

class PotentialDomainError : public std::domain_error {
public:
   using std::domain_error::domain_error;
};

/// Yukawa core hit: the grid or sample point sits at r = 0.
class SingularOrigin : public PotentialDomainError {
public:
   using PotentialDomainError::PotentialDomainError;
};

/// Smooth real profile g(s) of s = -x_perp^2 >= 0.
struct GFunction {
   enum class Kind { constant, polynomial, gaussian };

   Kind kind = Kind::constant;
   std::vector<double> coefficients; // polynomial: c0 + c1 s + c2 s^2 + ...
   double amplitude = 0.0;           // constant value, or gaussian height
   double width = 1.0;               // gaussian: amplitude * exp(-s / width^2)

   static GFunction constant(double value) { return {Kind::constant, {}, value, 1.0}; }
   static GFunction polynomial(std::vector<double> c) { return {Kind::polynomial, std::move(c), 0.0, 1.0}; }
   static GFunction gaussian(double amplitude, double width)
   {
      if (!(width > 0.0)) throw std::invalid_argument("gaussian width must be positive");
      return {Kind::gaussian, {}, amplitude, width};
   }

   double operator()(double s) const
   {
      switch (kind) {
      case Kind::constant: return amplitude;
      case Kind::polynomial: {
         double acc = 0.0;
         for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * s + *it;
         return acc;
      }
      case Kind::gaussian: return amplitude * std::exp(-s / (width * width));
      }
      return 0.0;
   }

   /// dg/ds
   double derivative(double s) const
   {
      switch (kind) {
      case Kind::constant: return 0.0;
      case Kind::polynomial: {
         double acc = 0.0;
         for (std::size_t k = coefficients.size(); k-- > 1;) acc = acc * s + static_cast<double>(k) * coefficients[k];
         return acc;
      }
      case Kind::gaussian: return -amplitude / (width * width) * std::exp(-s / (width * width));
      }
      return 0.0;
   }
};

namespace potential {

struct Zero {};
struct Constant {
   double v = 0.0;
};
/// tanh(g(s)); bounded by 1 in absolute value for every real g.
struct TanhOfG {
   GFunction g;
};
/// tanh[-(1/(2 sqrt(P^2))) (g1 g2 / 4 pi) exp(-mu r) / r], r = sqrt(-x_perp^2).
struct YukawaTanh {
   double g1 = 0.0;
   double g2 = 0.0;
   double mu = 1.0;
};
/// V = g(s) with no bounding; used to probe the scalar bound criterion.
struct Profile {
   GFunction g;
};

} // namespace potential

using PotentialSpec =
   std::variant<potential::Zero, potential::Constant, potential::TanhOfG, potential::YukawaTanh, potential::Profile>;

inline std::string potential_name(const PotentialSpec& spec)
{
   constexpr const char* names[] = {"zero", "constant", "tanh_of_g", "yukawa_tanh", "profile"};
   return names[spec.index()];
}

inline bool depends_on_energy(const PotentialSpec& spec)
{
   return std::holds_alternative<potential::YukawaTanh>(spec);
}

/// (g1 g2 / 4 pi) exp(-mu r) / r
inline double yukawa_strength(const potential::YukawaTanh& y, double r)
{
   if (!(r > 0.0)) throw SingularOrigin("Yukawa potential evaluated at r = 0");
   return y.g1 * y.g2 / (4.0 * std::numbers::pi) * std::exp(-y.mu * r) / r;
}

namespace detail {

inline void check_args(double x_perp_sq, double P_sq)
{
   if (!(P_sq > 0.0)) throw PotentialDomainError("potential needs P^2 > 0");
   if (x_perp_sq > 0.0) throw PotentialDomainError("x_perp must be spacelike (x_perp^2 <= 0)");
}

template <class... Ts>
struct overloaded : Ts... {
   using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace detail

/// Argument of the outer tanh for the Yukawa variant, i.e. Delta_1.
inline double yukawa_argument(const potential::YukawaTanh& y, double x_perp_sq, double P_sq)
{
   detail::check_args(x_perp_sq, P_sq);
   return -yukawa_strength(y, std::sqrt(-x_perp_sq)) / (2.0 * std::sqrt(P_sq));
}

inline double eval_V(const PotentialSpec& spec, double x_perp_sq, double P_sq)
{
   detail::check_args(x_perp_sq, P_sq);
   const double s = -x_perp_sq;
   return std::visit(detail::overloaded{
                        [](const potential::Zero&) { return 0.0; },
                        [](const potential::Constant& c) { return c.v; },
                        [s](const potential::TanhOfG& t) { return std::tanh(t.g(s)); },
                        [&](const potential::YukawaTanh& y) {
                           return std::tanh(yukawa_argument(y, x_perp_sq, P_sq));
                        },
                        [s](const potential::Profile& p) { return p.g(s); },
                     },
                     spec);
}

/// V continued to a complex c.m. energy P0 (P^2 = P0^2). sqrt(P^2) is taken on
/// the branch that equals |P0| on the real axis.
inline std::complex<double> eval_V_at_energy(const PotentialSpec& spec, double x_perp_sq, std::complex<double> P0)
{
   if (const auto* y = std::get_if<potential::YukawaTanh>(&spec)) {
      if (x_perp_sq > 0.0) throw PotentialDomainError("x_perp must be spacelike (x_perp^2 <= 0)");
      if (P0 == 0.0) throw PotentialDomainError("potential needs P^2 > 0");
      const std::complex<double> root = P0.real() >= 0.0 ? P0 : -P0;
      return std::tanh(-yukawa_strength(*y, std::sqrt(-x_perp_sq)) / (2.0 * root));
   }
   if (P0 == 0.0) throw PotentialDomainError("potential needs P^2 > 0");
   // remaining variants carry no energy dependence
   return eval_V(spec, x_perp_sq, 1.0);
}

/// Analytic dV/d(P^2) at fixed x_perp^2.
inline double eval_dV_dP2(const PotentialSpec& spec, double x_perp_sq, double P_sq)
{
   detail::check_args(x_perp_sq, P_sq);
   if (const auto* y = std::get_if<potential::YukawaTanh>(&spec)) {
      const double a = yukawa_strength(*y, std::sqrt(-x_perp_sq));
      const double arg = -a / (2.0 * std::sqrt(P_sq));
      const double sech = 1.0 / std::cosh(arg);
      return 0.25 * a * std::pow(P_sq, -1.5) * sech * sech;
   }
   return 0.0;
}

/// Delta = artanh(V).
inline double delta_of(const PotentialSpec& spec, double x_perp_sq, double P_sq)
{
   if (const auto* y = std::get_if<potential::YukawaTanh>(&spec)) return yukawa_argument(*y, x_perp_sq, P_sq);
   const double v = eval_V(spec, x_perp_sq, P_sq);
   if (!(std::abs(v) < 1.0)) throw PotentialDomainError("artanh needs |V| < 1");
   return std::atanh(v);
}

/// dDelta/d(P^2) = (dV/dP^2) / (1 - V^2).
inline double delta_dP2(const PotentialSpec& spec, double x_perp_sq, double P_sq)
{
   if (const auto* y = std::get_if<potential::YukawaTanh>(&spec)) {
      detail::check_args(x_perp_sq, P_sq);
      return 0.25 * yukawa_strength(*y, std::sqrt(-x_perp_sq)) * std::pow(P_sq, -1.5);
   }
   const double v = eval_V(spec, x_perp_sq, P_sq);
   if (!(std::abs(v) < 1.0)) throw PotentialDomainError("artanh needs |V| < 1");
   return eval_dV_dP2(spec, x_perp_sq, P_sq) / (1.0 - v * v);
}

/// y = (1/(2|P0|)) (g1 g2 / 4 pi) exp(-mu r) / r
inline double y_of(double g1, double g2, double mu, double P0, double r)
{
   if (!(r > 0.0)) throw PotentialDomainError("y needs r > 0");
   if (P0 == 0.0) throw PotentialDomainError("y needs P0 != 0");
   return g1 * g2 / (4.0 * std::numbers::pi) * std::exp(-mu * r) / r / (2.0 * std::abs(P0));
}

} // namespace tbdkit
