#include "catch_amalgamated.hpp"

#include "helpers.hpp"

using namespace tbdkit;

namespace {

TwoBodyDiracSystem make_system(double v, const char* rep = "dirac")
{
   if (v == 0.0) return {MassPair(1.0, 1.3), potential::Zero{}, build_gammas(rep)};
   return {MassPair(1.0, 1.3), potential::Constant{v}, build_gammas(rep)};
}

struct Pair {
   PlaneWaveState a, b;
};

// P != P': different spatial momenta on the effective shells
Pair distinct_pair(const TwoBodyDiracSystem& sys)
{
   return {constant_v_solution(sys, {0.3, 0.0, 0.1}, {-0.2, 0.4, 0.0}, {1.0, 0.5, cplx(0, 0.3), -0.2}),
           constant_v_solution(sys, {-0.1, 0.2, 0.3}, {0.5, -0.1, 0.2}, {0.2, -1.0, 0.4, cplx(0.1, 0.7)})};
}

// P = P' in the c.m. frame: k2 = -k1, equal |k1|, different directions
Pair same_P_pair(const TwoBodyDiracSystem& sys)
{
   const Eigen::Vector3d ka(0.4, 0.0, 0.0), kb(0.0, 0.24, 0.32);
   return {constant_v_solution(sys, ka, -ka, {1.0, 0.2, 0.0, 0.3}),
           constant_v_solution(sys, kb, -kb, {0.0, 1.0, cplx(0, 0.5), 0.1})};
}

double max_abs(const Vec4cd& v) { return v.cwiseAbs().maxCoeff(); }

// d/dx1^mu of the evaluated current by central differences
Vec4cd fd_divergence1(const PlaneWaveCurrent& j, const FourVector& x1, const FourVector& x2)
{
   const double h = 1e-4;
   Vec4cd out = Vec4cd::Zero();
   for (int nu = 0; nu < 4; ++nu)
      for (int mu = 0; mu < 4; ++mu) {
         FourVector e{};
         (mu == 0 ? e.t : mu == 1 ? e.x : mu == 2 ? e.y : e.z) = h;
         out(nu) += (j.evaluate(mu, nu, x1 + e, x2) - j.evaluate(mu, nu, x1 - e, x2)) / (2 * h);
      }
   return out;
}

} // namespace

TEST_CASE("free current basics")
{
   const auto sys = make_system(0.0);
   const auto [a, b] = distinct_pair(sys);
   const auto jaa = j_free(sys.gammas, a, a);
   CHECK(std::abs(jaa.coefficients(0, 0) - a.u.squaredNorm()) < 1e-14);
   CHECK(jaa.coefficients(0, 0).real() > 0.0);
   const auto jab = j_free(sys.gammas, a, b), jba = j_free(sys.gammas, b, a);
   CHECK((jab.coefficients - jba.coefficients.conjugate()).cwiseAbs().maxCoeff() < 1e-14);
   CHECK(jab.q1 == -jba.q1);
}

TEST_CASE("product states factorise into one-particle currents", "[oracle]")
{
   std::mt19937_64 rng(17);
   const auto g = build_gammas("dirac");
   const Vec16c r1 = testutil::random_spinor(rng), r2 = testutil::random_spinor(rng);
   const Eigen::Vector4cd ua = r1.head<4>(), va = r1.tail<4>(), ub = r2.head<4>(), vb = r2.tail<4>();
   PlaneWaveState a, b;
   for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) {
         a.u(4 * i + k) = ua(i) * va(k);
         b.u(4 * i + k) = ub(i) * vb(k);
      }
   const auto j = j_free(g, a, b);
   for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
         const cplx one = ua.dot(g[0] * g[mu] * ub);
         const cplx two = va.dot(g[0] * g[nu] * vb);
         CHECK(std::abs(j.coefficients(mu, nu) - one * two) < 1e-12);
      }
}

TEST_CASE("closed-form divergence matches direct differentiation", "[oracle]")
{
   const auto sys = make_system(0.3);
   const auto a = single_equation_state(sys, Particle::one, {1.9, 0.2, -0.1, 0.3}, {0.3, 0.1, 0.0});
   const auto b = single_equation_state(sys, Particle::one, {2.2, -0.4, 0.3, 0.1}, {-0.2, 0.5, 0.1});
   const auto j = j_free(sys.gammas, a, b);
   REQUIRE(max_abs(divergence1(j)) > 1e-3);
   const FourVector x1{0.3, -0.2, 0.5, 0.1}, x2{-0.4, 0.6, 0.0, 0.2};
   const Vec4cd fd = fd_divergence1(j, x1, x2);
   const cplx phase = std::exp(I * (j.q1.dot(x1) + j.q2.dot(x2)));
   CHECK(max_abs(fd - divergence1(j) * phase) < 1e-8);
}

TEST_CASE("free solutions carry a conserved current")
{
   for (auto rep : {"dirac", "weyl"}) {
      const auto sys = make_system(0.0, rep);
      for (const auto& [a, b] : {distinct_pair(sys), same_P_pair(sys)}) {
         const auto j = j_free(sys.gammas, a, b);
         CHECK(max_abs(divergence1(j)) <= 1e-12);
         CHECK(max_abs(divergence2(j)) <= 1e-12);
         CHECK(verify_conservation(j, 1e-12).passed);
         const auto d = defects(sys, a, b);
         CHECK(max_abs(d.F1) <= 1e-12);
         CHECK(std::abs(d.F) <= 1e-12);
         CHECK(j_add(d, GreenChoice::advanced, 1e-3).coefficients.cwiseAbs().maxCoeff() <= 1e-12);
      }
   }
}

TEST_CASE("constant-v joint solutions keep the free current conserved", "[invariant]")
{
   for (auto rep : {"dirac", "weyl"}) {
      const auto sys = make_system(0.3, rep);
      for (const auto& [a, b] : {distinct_pair(sys), same_P_pair(sys)}) {
         const auto j = j_free(sys.gammas, a, b);
         const auto surviving = claim1_surviving_terms(sys, a, b);
         CHECK(max_abs(divergence1(j)) <= 1e-12);
         CHECK(max_abs(divergence2(j)) <= 1e-12);
         CHECK(max_abs(divergence1(j) - surviving[0]) <= 1e-10);
         CHECK(max_abs(divergence2(j) - surviving[1]) <= 1e-10);
         const auto d = defects(sys, a, b);
         CHECK(std::abs(d.F) <= 1e-12);
      }
   }
}

TEST_CASE("single-equation states carry the surviving divergence", "[oracle]")
{
   for (auto rep : {"dirac", "weyl"}) {
      const auto sys = make_system(0.3, rep);
      const FourVector pa{1.9, 0.2, -0.1, 0.3}, pb{2.2, -0.4, 0.3, 0.1};
      const auto a1 = single_equation_state(sys, Particle::one, pa, {0.3, 0.1, 0.0}, {1, 0.4, 0, cplx(0, 0.2)});
      const auto b1 = single_equation_state(sys, Particle::one, pb, {-0.2, 0.5, 0.1}, {0.1, 1, 0.3, 0});
      CHECK(stacked_matrix(sys, a1.p1, a1.p2).topRows<16>().operator*(a1.u).norm() < 1e-12);
      CHECK(solution_residual(sys, a1) > 1e-3);
      const auto j1 = j_free(sys.gammas, a1, b1);
      const auto s1 = claim1_surviving_terms(sys, a1, b1);
      CHECK(max_abs(divergence1(j1)) >= 1e-3);
      CHECK(max_abs(divergence1(j1) - s1[0]) <= 1e-10);

      const auto a2 = single_equation_state(sys, Particle::two, pa, {0.1, -0.3, 0.2}, {0.5, 0, 1, 0.2});
      const auto b2 = single_equation_state(sys, Particle::two, pb, {0.4, 0.0, -0.2}, {0, 0.3, 0.1, 1});
      CHECK(stacked_matrix(sys, a2.p1, a2.p2).bottomRows<16>().operator*(a2.u).norm() < 1e-12);
      const auto j2 = j_free(sys.gammas, a2, b2);
      const auto s2 = claim1_surviving_terms(sys, a2, b2);
      CHECK(max_abs(divergence2(j2)) >= 1e-3);
      CHECK(max_abs(divergence2(j2) - s2[1]) <= 1e-10);
      CHECK_FALSE(verify_conservation(j2, 1e-8).passed);
   }
}

TEST_CASE("defect fields")
{
   const auto sys = make_system(0.3);
   const auto [a, b] = distinct_pair(sys);
   CHECK(defects(sys, a, b).mixed_consistency() <= 1e-9);
   PlaneWaveState bad = a;
   bad.p1.t += 0.1;
   CHECK_THROWS_AS(defects(sys, bad, b), NotASolution);

   const auto a1 = single_equation_state(sys, Particle::one, {1.9, 0.2, -0.1, 0.3}, {0.3, 0.1, 0.0});
   const auto b1 = single_equation_state(sys, Particle::one, {2.2, -0.4, 0.3, 0.1}, {-0.2, 0.5, 0.1});
   CHECK_THROWS_AS(defects(sys, a1, b1), NotASolution);
   const auto d = defects_of_current(j_free(sys.gammas, a1, b1));
   CHECK(d.mixed_consistency() <= 1e-9);
   CHECK(std::abs(d.F) > 1e-3);
}

TEST_CASE("green's function completion restores conservation", "[oracle]")
{
   const std::vector<double> eps{1e-2, 1e-3, 1e-4};
   for (auto rep : {"dirac", "weyl"}) {
      const auto sys = make_system(0.3, rep);
      const auto [a, b] = distinct_pair(sys);
      const auto jf = j_free(sys.gammas, a, b);
      CHECK(verify_conservation(jf + j_add_extrapolated(defects(sys, a, b), GreenChoice::advanced, eps), 1e-8).passed);

      // nonzero defects: a pair solving only the first equation
      const auto a1 = single_equation_state(sys, Particle::one, {1.9, 0.2, -0.1, 0.3}, {0.3, 0.1, 0.0});
      const auto b1 = single_equation_state(sys, Particle::one, {2.2, -0.4, 0.3, 0.1}, {-0.2, 0.5, 0.1});
      const auto j1 = j_free(sys.gammas, a1, b1);
      const auto d = defects_of_current(j1);
      REQUIRE(d.q1.t != 0.0);
      REQUIRE(d.q2.t != 0.0);
      for (auto choice : {GreenChoice::advanced, GreenChoice::retarded}) {
         std::vector<double> residual;
         for (double e : eps) {
            const auto r = verify_conservation(j1 + j_add(d, choice, e), 1e-8);
            residual.push_back(std::max(r.max_divergence1, r.max_divergence2));
         }
         CHECK(residual[0] > 1e-6);
         CHECK(residual[1] < residual[0]);
         CHECK(residual[2] < residual[1]);
         CHECK(verify_conservation(j1 + j_add_extrapolated(d, choice, eps), 1e-8).passed);
      }
   }
   CHECK_THROWS_AS(green_multiplier({0.0, 0, 0, 0}, GreenChoice::advanced, 0.0), GreenSingularity);
   CHECK_THROWS_AS(j_add({}, GreenChoice::advanced, -1.0), std::invalid_argument);
}

TEST_CASE("green multiplier inverts the d'Alembertian")
{
   const FourVector q{0.4, 1.0, -0.3, 0.2};
   // box exp(i q.x) = -q^2 exp(i q.x)
   for (auto c : {GreenChoice::advanced, GreenChoice::retarded})
      CHECK(std::abs(-q.square() * green_multiplier(q, c, 0.0) - 1.0) < 1e-15);
   const cplx adv = green_multiplier(q, GreenChoice::advanced, 1e-3);
   const cplx ret = green_multiplier(q, GreenChoice::retarded, 1e-3);
   CHECK(std::abs(adv - std::conj(ret)) < 1e-15);
   CHECK(adv.imag() != 0.0);
}

TEST_CASE("neville extrapolation is exact on polynomials")
{
   const std::vector<double> x{0.3, 0.1, 0.05};
   std::vector<double> y;
   for (double e : x) y.push_back(2.0 - 3.0 * e + 5.0 * e * e);
   CHECK(std::abs(extrapolate_to_zero(x, y) - 2.0) < 1e-13);
   CHECK_THROWS_AS(extrapolate_to_zero<double>({}, {}), std::invalid_argument);
}

TEST_CASE("equal-energy limit of the difference term", "[oracle]")
{
   const std::vector<double> eps{1e-2, 1e-3, 1e-4};
   std::mt19937_64 rng(19);
   std::uniform_real_distribution<double> r(0.2, 3.0), p0(0.6, 3.0);
   for (int trial = 0; trial < 50; ++trial) {
      const PotentialSpec spec = potential::YukawaTanh{2.0, 3.5, 0.6};
      const double rr = r(rng), P0 = p0(rng);
      const double exact = 4.0 * P0 * P0 * eval_dV_dP2(spec, -rr * rr, P0 * P0);
      const double limit = energy_term_limit(spec, -rr * rr, P0, eps);
      CHECK(std::abs(limit - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
   }
   CHECK(std::abs(energy_term_limit(potential::Constant{0.4}, -1.0, 1.5, eps)) < 1e-15);
}
