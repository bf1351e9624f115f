#include "catch_amalgamated.hpp"

#include <boost/math/special_functions/lambert_w.hpp>

#include "helpers.hpp"

using namespace tbdkit;

namespace {

const double four_pi = 4.0 * std::numbers::pi;

InternalField field_from(const Grid& g, const FourVector& P, std::uint64_t seed)
{
   InternalField f(P, g);
   f.add_mode(0.2, testutil::band_limited(g, seed, 1));
   f.add_mode(-0.1, testutil::band_limited(g, seed + 1000, 1));
   return f;
}

// eigenvector of g1^0 g2^0 with eigenvalue `sign`
Vec16c beta_eigenvector(const GammaSet& g, double sign)
{
   Eigen::SelfAdjointEigenSolver<Mat16c> es(beta12(g));
   return sign < 0 ? Vec16c(es.eigenvectors().col(0)) : Vec16c(es.eigenvectors().col(15));
}

} // namespace

TEST_CASE("free product")
{
   const Grid g(12, 6.0);
   const FourVector P{2.0, 0, 0, 0};
   const auto f = field_from(g, P, 1);
   const cplx n = free_inner_product(f, f);
   CHECK(n.real() > 0.0);
   CHECK(std::abs(n.imag()) < 1e-14 * n.real());

   InternalField up(P, g), down(P, g);
   SpinorField a(g.field_size()), b(g.field_size());
   for (std::size_t pt = 0; pt < g.points(); ++pt) {
      a[pt * 16 + 3] = std::exp(-g.position(pt).squaredNorm());
      b[pt * 16 + 9] = std::exp(-g.position(pt).squaredNorm());
   }
   up.add_mode(0.0, a);
   down.add_mode(0.0, b);
   CHECK(free_inner_product(up, down) == cplx(0.0, 0.0));
   CHECK_THROWS_AS(free_inner_product(f, field_from(Grid(8, 6.0), P, 1)), std::invalid_argument);
}

TEST_CASE("normalised gaussian has unit norm", "[oracle]")
{
   const Grid g(32, 12.0);
   const double sigma = 1.0;
   std::mt19937_64 rng(2);
   Vec16c u = testutil::random_spinor(rng);
   u.normalize();
   InternalField f({2.0, 0, 0, 0}, g);
   SpinorField chi = testutil::gaussian_field(g, u, sigma);
   for (auto& v : chi) v *= std::pow(std::numbers::pi * sigma * sigma, -0.75);
   f.add_mode(0.0, chi);
   CHECK(std::abs(free_inner_product(f, f) - 1.0) <= 1e-8);
}

TEST_CASE("kernels of the simple potentials")
{
   const Grid g(8, 4.0);
   const auto G = build_gammas("dirac");
   const FourVector P{1.7, 0, 0, 0};
   const auto sz = build_kernel(KernelFlavor::sazdjian, potential::Zero{}, P, g, G);
   const auto fr = build_kernel(KernelFlavor::free, potential::Zero{}, P, g, G);
   const auto cr = build_kernel(KernelFlavor::crater, potential::TanhOfG{GFunction::gaussian(0.7, 1.0)}, P, g, G);
   for (std::size_t pt = 0; pt < g.points(); ++pt) {
      CHECK((sz.matrix_at(pt) - beta12(G)).cwiseAbs().maxCoeff() == 0.0);
      CHECK((fr.matrix_at(pt) - beta12(G)).cwiseAbs().maxCoeff() == 0.0);
      CHECK((cr.matrix_at(pt) - Mat16c::Identity()).cwiseAbs().maxCoeff() == 0.0);
   }
   CHECK_THROWS_AS(build_kernel(KernelFlavor::free, potential::Zero{}, {2, 1, 0, 0}, g, G), std::invalid_argument);
   CHECK_THROWS(build_kernel(KernelFlavor::free, potential::Zero{}, {1, 2, 0, 0}, g, G));
   CHECK(parse_flavor("crater") == KernelFlavor::crater);
   CHECK_THROWS_AS(parse_flavor("bogus"), std::invalid_argument);
}

TEST_CASE("tanh kernel spectrum", "[oracle]")
{
   const Grid g(8, 4.0);
   const auto G = build_gammas("weyl");
   const PotentialSpec spec = potential::TanhOfG{GFunction::polynomial({0.9, -0.4})};
   const auto k = build_kernel(KernelFlavor::sazdjian, spec, {2.0, 0, 0, 0}, g, G);
   for (std::size_t pt = 0; pt < g.points(); pt += 5) {
      const double f = eval_V(spec, -g.position(pt).squaredNorm(), 4.0);
      Eigen::SelfAdjointEigenSolver<Mat16c> es(k.matrix_at(pt), Eigen::EigenvaluesOnly);
      for (int i = 0; i < 8; ++i) CHECK(std::abs(es.eigenvalues()(i) + (1 - f * f)) < 1e-13);
      for (int i = 8; i < 16; ++i) CHECK(std::abs(es.eigenvalues()(i) - (1 - f * f)) < 1e-13);
      CHECK(std::abs(min_eigenvalue(k.form_matrix_at(pt)) - (1 - f * f)) < 1e-13);
   }
}

TEST_CASE("kernels are hermitian and give real norms", "[invariant]")
{
   const Grid g(8, 4.0);
   const auto G = build_gammas("dirac");
   const FourVector P{1.3, 0, 0, 0};
   for (auto flavor : {KernelFlavor::free, KernelFlavor::sazdjian, KernelFlavor::crater}) {
      const auto k = build_kernel(flavor, potential::YukawaTanh{1.0, 2.0, 0.5}, P, g, G);
      for (std::size_t pt = 0; pt < g.points(); ++pt) {
         const Mat16c m = k.matrix_at(pt);
         CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
      }
      for (std::uint64_t s = 0; s < 5; ++s) {
         const auto f = field_from(g, P, 40 + s);
         const cplx n = interacting_inner_product(k, f, f);
         CHECK(std::abs(n.imag()) <= 1e-12 * std::abs(n));
      }
   }
}

TEST_CASE("free flavor reproduces the free product")
{
   const Grid g(8, 4.0);
   const FourVector P{2.1, 0, 0, 0};
   const auto k = build_kernel(KernelFlavor::free, potential::Zero{}, P, g, build_gammas("dirac"));
   for (std::uint64_t s = 0; s < 20; ++s) {
      const auto a = field_from(g, P, 100 + s), b = field_from(g, P, 200 + s);
      const cplx x = interacting_inner_product(k, a, b), y = free_inner_product(a, b);
      CHECK(std::abs(x - y) <= 1e-12 * std::abs(y));
   }
   CHECK_THROWS_AS(interacting_inner_product(k, field_from(g, {2.0, 0, 0, 0}, 1), field_from(g, {2.0, 0, 0, 0}, 2)),
                   std::invalid_argument);
}

TEST_CASE("bounded scalar potential gives a positive norm")
{
   const Grid g(10, 5.0);
   const FourVector P{1.5, 0, 0, 0};
   const auto k = build_kernel(KernelFlavor::sazdjian, potential::TanhOfG{GFunction::polynomial({1.5, -0.8, 0.1})}, P,
                               g, build_gammas("dirac"));
   for (std::uint64_t s = 0; s < 10; ++s) {
      const auto f = field_from(g, P, 300 + s);
      CHECK(interacting_inner_product(k, f, f).real() > 0.0);
   }
}

TEST_CASE("yukawa core produces a negative norm")
{
   const double r_star = ::boost::math::lambert_w0(1.0);
   const Grid g(32, 3.0);
   const auto G = build_gammas("dirac");
   const FourVector P{1.0, 0, 0, 0};
   const PotentialSpec spec = potential::YukawaTanh{1.0, four_pi, 1.0};
   InternalField f(P, g);
   f.add_mode(0.0, testutil::gaussian_field(g, beta_eigenvector(G, -1.0), 0.12, {0.1 * r_star, 0, 0}));
   const auto k = build_kernel(KernelFlavor::sazdjian, spec, P, g, G);
   CHECK(interacting_inner_product(k, f, f).real() < 0.0);
   const auto c = build_kernel(KernelFlavor::crater, spec, P, g, G);
   InternalField h(P, g);
   h.add_mode(0.0, testutil::gaussian_field(g, beta_eigenvector(G, 1.0), 0.12, {0.1 * r_star, 0, 0}));
   CHECK(interacting_inner_product(c, h, h).real() < 0.0);
}

TEST_CASE("trace condition")
{
   const auto G = build_gammas("dirac");
   const FourVector P{1.8, 0, 0, 0};
   const auto zero = trace_condition(G, TwoBodySpinOp(), P);
   CHECK(zero.value == 0.0);
   CHECK(zero.satisfied);
   const auto scalar = trace_condition(G, 0.7 * TwoBodySpinOp::identity(), P);
   CHECK(std::abs(scalar.value) < 1e-15);
   for (double v : {0.5, 0.999, 1.0, 1.3}) {
      const auto t = trace_condition(G, TwoBodySpinOp(v * beta12(G)), P);
      CHECK(std::abs(t.value - v) < 1e-14);
      CHECK(std::abs(t.raw_trace - 16.0 * v) < 1e-13);
      CHECK(std::abs(t.quarter_trace - 4.0 * v) < 1e-13);
      CHECK(t.satisfied == (v < 1.0));
   }
   // boosted P: only the direction of P matters
   const auto boosted = trace_condition(G, TwoBodySpinOp(0.5 * beta12(G)), {2.0, 0.0, 0.0, 0.0});
   CHECK(std::abs(boosted.value - 0.5) < 1e-14);
}

TEST_CASE("sazdjian and crater boundaries coincide", "[invariant]")
{
   const auto G = build_gammas("dirac");
   for (double P0 : {0.5, 1.0, 2.0}) {
      const PotentialSpec spec = potential::YukawaTanh{1.0, four_pi, 1.0};
      const double rs = kernel_boundary_radius(KernelFlavor::sazdjian, spec, P0, G, 0.05, 3.0);
      const double rc = kernel_boundary_radius(KernelFlavor::crater, spec, P0, G, 0.05, 3.0);
      const double oracle = ::boost::math::lambert_w0(1.0 / P0);
      CHECK(std::abs(rs - rc) <= 1e-9);
      CHECK(std::abs(rs - oracle) <= 1e-9);
   }
}
