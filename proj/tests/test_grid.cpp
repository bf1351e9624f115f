#include "catch_amalgamated.hpp"

#include "helpers.hpp"

using namespace tbdkit;

TEST_CASE("offset grid never samples the origin")
{
   for (int n : {8, 16, 32}) {
      const Grid g(n, 4.0);
      double rmin = 1e9;
      for (std::size_t pt = 0; pt < g.points(); ++pt) rmin = std::min(rmin, g.position(pt).norm());
      CHECK(rmin > 0.4 * g.spacing());
   }
   const Grid plain(8, 4.0, false);
   CHECK(plain.position(plain.index(4, 4, 4)).norm() == 0.0);
   CHECK_THROWS_AS(Grid(1, 1.0), std::invalid_argument);
   CHECK_THROWS_AS(Grid(8, 0.0), std::invalid_argument);
}

TEST_CASE("wavenumbers")
{
   const Grid g(8, 2.0 * std::numbers::pi);
   CHECK(g.wavenumber(0) == 0.0);
   CHECK(g.wavenumber(3) == 3.0);
   CHECK(g.wavenumber(4) == 0.0);
   CHECK(g.wavenumber(5) == -3.0);
   CHECK(g.wavenumber(7) == -1.0);
}

TEST_CASE("fft round trip")
{
   const Grid g(12, 3.0);
   SpinorField f = testutil::band_limited(g, 1, 3);
   const SpinorField orig = f;
   g.forward(f);
   g.backward(f);
   double err = 0.0;
   for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(f[i] - orig[i]));
   CHECK(err < 1e-12 * testutil::max_abs(orig));
   SpinorField wrong(10);
   CHECK_THROWS_AS(g.forward(wrong), std::invalid_argument);
}

TEST_CASE("a resolved plane wave lands on its wavevector")
{
   const Grid g(16, 5.0);
   const Eigen::Vector3d k = 2.0 * std::numbers::pi / 5.0 * Eigen::Vector3d(2, -3, 1);
   SpinorField f(g.field_size());
   for (std::size_t pt = 0; pt < g.points(); ++pt) f[pt * 16 + 5] = std::exp(I * k.dot(g.position(pt)));
   g.forward(f);
   std::size_t peak = 0;
   double best = 0.0;
   for (std::size_t pt = 0; pt < g.points(); ++pt)
      if (std::abs(f[pt * 16 + 5]) > best) best = std::abs(f[pt * 16 + 5]), peak = pt;
   CHECK((g.wavevector(peak) - k).norm() < 1e-12);
   CHECK(std::abs(best - static_cast<double>(g.points())) < 1e-9);
}

TEST_CASE("chunked loops are independent of the worker count")
{
   std::vector<double> out(1000);
   for (const char* threads : {"1", "3", "8"}) {
      setenv("TBDKIT_THREADS", threads, 1);
      std::vector<std::size_t> owner(1000);
      parallel_chunks(1000, 7, [&](std::size_t b, std::size_t e, std::size_t c) {
         for (std::size_t i = b; i < e; ++i) owner[i] = c;
      });
      for (std::size_t i = 0; i < 1000; ++i) CHECK(owner[i] == i / 143);
   }
   setenv("TBDKIT_THREADS", "2", 1);
   CHECK(thread_count() <= 2);
   setenv("TBDKIT_THREADS", "junk", 1);
   CHECK(thread_count() >= 1);
   unsetenv("TBDKIT_THREADS");
}
