#include "catch_amalgamated.hpp"

#include <random>

#include "tbdkit/toy_model.hpp"

using namespace tbdkit::toy;

TEST_CASE("products and membership")
{
   CHECK(a_product(Vec2c(1, 0), Vec2c(1, 0)) == cplx(1.0));
   CHECK(a_product(Vec2c(0, 1), Vec2c(0, 1)) == cplx(-1.0));
   CHECK(a_product(Vec2c(1, 1), Vec2c(1, 1)) == cplx(0.0));

   const Vec2c v1(1.0, 0.5), v2(-1.0, 0.5);
   CHECK(in_h_pos(v1));
   CHECK(in_h_pos(v2));
   CHECK_FALSE(in_h_pos(v1 + v2));
   CHECK(in_h_pos(Vec2c::Zero()));

   for (int n = 1; n <= 1000; n *= 3) {
      const double x = 1.0 - 1.0 / n;
      const Vec2c vn(1.0, x);
      CHECK(in_h_pos(vn));
      CHECK(std::abs(a_product(vn, vn).real() - (1.0 - x * x)) < 1e-15);
   }
   CHECK_FALSE(in_h_pos(Vec2c(1, 1)));
   CHECK(on_null_cone(Vec2c(1, 1)));
   CHECK_FALSE(on_null_cone(Vec2c::Zero()));
}

TEST_CASE("evolution")
{
   for (double t : {0.0, 0.3, 1.0, 2.5}) {
      const Vec2c u = evolve(Vec2c(1, 0), t);
      CHECK(std::abs(u(0) - std::cos(t)) < 1e-15);
      CHECK(std::abs(u(1) + std::sin(t)) < 1e-15);
   }
   std::mt19937_64 rng(4);
   std::normal_distribution<double> n;
   for (int i = 0; i < 50; ++i) {
      const Vec2c u0(cplx(n(rng), n(rng)), cplx(n(rng), n(rng)));
      const double t = 3.0 * n(rng);
      CHECK(evolve(u0, 0.0) == u0);
      CHECK(std::abs(evolve(u0, t).norm() - u0.norm()) < 1e-12);
      const Vec2c u = evolve(u0, t);
      CHECK(std::abs(a_product(u, u).real() - evolved_norm(u0(0), u0(1), t)) < 1e-12);
   }
}

TEST_CASE("B is hermitian but not A-self-adjoint")
{
   const Mat2c A = metric_A(), B = generator_B();
   CHECK(A == A.adjoint());
   CHECK(B == B.adjoint());
   CHECK(a_adjoint_defect().cwiseAbs().maxCoeff() == 2.0);
   CHECK(A * B != B.adjoint() * A);
}

TEST_CASE("no initial value stays positive")
{
   const double tq = std::numbers::pi / 4, t3q = 3 * std::numbers::pi / 4;
   CHECK(std::abs(evolved_norm(1.0, 0.0, tq)) < 1e-15);
   CHECK(std::abs(evolved_norm(1.0, 0.5, tq) - 1.0) < 1e-15);
   CHECK(std::abs(evolved_norm(1.0, 0.5, t3q) + 1.0) < 1e-15);

   const auto grid = breakdown_grid(10, 10, 100);
   REQUIRE(grid.size() == 10000);
   const auto rep = positivity_breakdown_search(grid);
   CHECK(rep.samples == 10000);
   CHECK(rep.survivors == 0);
   CHECK(rep.survivor_list.empty());
   CHECK(rep.positive_at_quarter > 0);
   CHECK(rep.positive_at_three_quarter > 0);
   CHECK(rep.max_formula_mismatch < 1e-12);

   const auto skipped = positivity_breakdown_search({Vec2c(0.5, 1.0), Vec2c(1.0, 1.0)});
   CHECK(skipped.samples == 0);
}
