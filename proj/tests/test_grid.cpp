#include <cmath>
#include <complex>

#include "doctest.h"
#include "mfld/grid.hpp"
#include "test_helpers.hpp"

using namespace mfld;
using mfld_test::kPi;

TEST_CASE("grid spec validation") {
  CHECK_NOTHROW(GridSpec(1, 4, 1.0));
  CHECK_NOTHROW(GridSpec(2, 64, 6.0));
  CHECK_THROWS_AS(GridSpec(1, 7, 1.0), parameter_error);   // odd M
  CHECK_THROWS_AS(GridSpec(1, 2, 1.0), parameter_error);   // below minimum
  CHECK_THROWS_AS(GridSpec(1, 2048, 1.0), parameter_error);
  CHECK_THROWS_AS(GridSpec(3, 8, 1.0), parameter_error);
  CHECK_THROWS_AS(GridSpec(1, 8, 0.0), parameter_error);
  CHECK_THROWS_AS(GridSpec(1, 8, -2.0), parameter_error);

  GridSpec g(2, 6, 3.0);
  CHECK(g.size() == 36);
  CHECK(g.spacing() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.cell_volume() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g.volume() == doctest::Approx(9.0).epsilon(1e-15));
}

TEST_CASE("signed modes and mode_ksq") {
  GridSpec g(1, 8, 2.0);
  CHECK(g.signed_mode(0) == 0);
  CHECK(g.signed_mode(3) == 3);
  CHECK(g.signed_mode(4) == 4);
  CHECK(g.signed_mode(5) == -3);
  CHECK(g.signed_mode(7) == -1);
  double unit = 2 * kPi / g.length;
  CHECK(g.mode_ksq(0) == doctest::Approx(0.0));
  CHECK(g.mode_ksq(3) == doctest::Approx(9 * unit * unit).epsilon(1e-14));
  CHECK(g.mode_ksq(6) == doctest::Approx(4 * unit * unit).epsilon(1e-14));

  GridSpec g2(2, 4, 1.0);
  double u2 = 2 * kPi;
  // flat = i0*M + i1, modes (1, -1) at slot 1*4+3
  CHECK(g2.mode_ksq(7) == doctest::Approx(2 * u2 * u2).epsilon(1e-14));
}

TEST_CASE("field length must match the grid") {
  GridSpec g(1, 8, 1.0);
  std::vector<cplx> wrong(7);
  CHECK_THROWS_AS(ComplexField(g, wrong), grid_mismatch_error);
  std::vector<double> wrong_r(9);
  CHECK_THROWS_AS(RealField(g, wrong_r), grid_mismatch_error);
  GridSpec other(1, 16, 1.0);
  ComplexField a(g), b(other);
  CHECK_THROWS_AS(inner_product(a, b), grid_mismatch_error);
}

TEST_CASE("inner product quadrature") {
  GridSpec g(1, 8, 1.0);
  ComplexField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 1.0;  // 1/sqrt(L) with L=1
  CHECK(std::abs(inner_product(f, f) - cplx(1.0, 0)) <= 1e-15);
  CHECK(l2_norm(f) == doctest::Approx(1.0).epsilon(1e-15));

  ComplexField p1 = mfld_test::plane_wave(g, 1);
  ComplexField p3 = mfld_test::plane_wave(g, 3);
  CHECK(std::abs(inner_product(p1, p3)) <= 1e-14);
  CHECK(std::abs(inner_product(p1, p1) - cplx(1.0, 0)) <= 1e-14);

  ComplexField a = mfld_test::random_field(g, 11);
  ComplexField b = mfld_test::random_field(g, 22);
  CHECK(std::abs(inner_product(a, b) - std::conj(inner_product(b, a))) <= 1e-15);

  GridSpec gd2(2, 8, 1.0);
  ComplexField c2(gd2);
  for (std::size_t i = 0; i < c2.size(); ++i) c2[i] = 1.0;
  CHECK(std::abs(inner_product(c2, c2) - cplx(1.0, 0)) <= 1e-14);
}

TEST_CASE("minus_laplacian on eigenfunctions") {
  GridSpec g(1, 32, 2 * kPi);
  ComplexField p = mfld_test::plane_wave(g, 1);
  ComplexField lp = minus_laplacian(p);
  double kappa2 = std::pow(2 * kPi / g.length, 2);
  double worst = 0;
  for (std::size_t i = 0; i < p.size(); ++i) worst = std::max(worst, std::abs(lp[i] - kappa2 * p[i]));
  CHECK(worst <= 1e-12);

  ComplexField c(g);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = cplx(0.7, -0.2);
  ComplexField lc = minus_laplacian(c);
  for (std::size_t i = 0; i < lc.size(); ++i) CHECK(std::abs(lc[i]) <= 1e-13);

  // cos(2x) on L = 2 pi has -f'' = 4 f
  ComplexField cosf(g);
  for (int i = 0; i < g.points; ++i) cosf[static_cast<std::size_t>(i)] = std::cos(2 * g.coordinate(i));
  ComplexField lcos = minus_laplacian(cosf);
  worst = 0;
  for (std::size_t i = 0; i < cosf.size(); ++i)
    worst = std::max(worst, std::abs(lcos[i] - 4.0 * cosf[i]));
  CHECK(worst <= 1e-12);

  // product plane wave in d=2: eigenvalue is the sum of the axis kappa^2
  GridSpec g2(2, 8, 1.0);
  ComplexField q(g2);
  for (int i0 = 0; i0 < 8; ++i0)
    for (int i1 = 0; i1 < 8; ++i1)
      q[static_cast<std::size_t>(i0 * 8 + i1)] =
          std::polar(1.0, 2 * kPi * (g2.coordinate(i0) + 2 * g2.coordinate(i1)));
  ComplexField lq = minus_laplacian(q);
  double want = std::pow(2 * kPi, 2) * (1 + 4);
  worst = 0;
  for (std::size_t i = 0; i < q.size(); ++i) worst = std::max(worst, std::abs(lq[i] - want * q[i]));
  CHECK(worst <= 1e-9);
}

TEST_CASE("minus_laplacian is Hermitian") {
  GridSpec g(1, 24, 5.0);
  ComplexField a = mfld_test::random_field(g, 5);
  ComplexField b = mfld_test::random_field(g, 9);
  cplx lhs = inner_product(a, minus_laplacian(b));
  cplx rhs = inner_product(minus_laplacian(a), b);
  CHECK(std::abs(lhs - rhs) <= 1e-11);
}

TEST_CASE("free evolution phases and unitarity") {
  GridSpec g(1, 16, 4.0);
  double t = 0.3;
  ComplexField p = mfld_test::plane_wave(g, 2);
  ComplexField evolved = free_evolution(p, t);
  double kappa2 = std::pow(2 * kPi * 2 / g.length, 2);
  cplx phase = std::polar(1.0, -kappa2 * t);
  double worst = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    worst = std::max(worst, std::abs(evolved[i] - phase * p[i]));
  CHECK(worst <= 1e-13);

  ComplexField r = mfld_test::random_field(g, 31);
  CHECK(std::abs(l2_norm(free_evolution(r, 1.7)) - 1.0) <= 1e-13);
  ComplexField back = free_evolution(free_evolution(r, 0.9), -0.9);
  CHECK(l2_norm(axpy(-1.0, r, back)) <= 1e-13);
}

TEST_CASE("convolution against direct sums") {
  GridSpec g(1, 16, 5.0);
  double h = g.spacing();

  RealField rho(g);
  for (int i = 0; i < g.points; ++i)
    rho[static_cast<std::size_t>(i)] = 0.3 + std::sin(2 * kPi * g.coordinate(i) / g.length);

  // delta scaled 1/h^d is the convolution identity
  RealField delta(g);
  delta[0] = 1.0 / g.cell_volume();
  RealField out = convolve(delta, rho);
  double worst = 0;
  for (std::size_t i = 0; i < rho.size(); ++i) worst = std::max(worst, std::abs(out[i] - rho[i]));
  CHECK(worst <= 1e-12);

  // constant kernel flattens to c h^d times the total mass
  RealField cons(g);
  for (std::size_t i = 0; i < cons.size(); ++i) cons[i] = 2.5;
  double mass = 0;
  for (std::size_t i = 0; i < rho.size(); ++i) mass += rho[i];
  out = convolve(cons, rho);
  for (std::size_t i = 0; i < out.size(); ++i)
    CHECK(out[i] == doctest::Approx(2.5 * h * mass).epsilon(1e-12));

  // gaussian * gaussian against the O(M^2) sum
  RealField a(g), b(g);
  for (int i = 0; i < g.points; ++i) {
    double x = g.coordinate(i);
    double d = std::min(x, g.length - x);
    a[static_cast<std::size_t>(i)] = std::exp(-d * d / 0.8);
    b[static_cast<std::size_t>(i)] = std::exp(-d * d / 1.3);
  }
  RealField fast = convolve(a, b);
  worst = 0;
  for (int i = 0; i < g.points; ++i) {
    double acc = 0;
    for (int j = 0; j < g.points; ++j) {
      int k = ((i - j) % g.points + g.points) % g.points;
      acc += a[static_cast<std::size_t>(k)] * b[static_cast<std::size_t>(j)];
    }
    worst = std::max(worst, std::abs(fast[static_cast<std::size_t>(i)] - h * acc));
  }
  CHECK(worst <= 1e-10);

  // complex overload agrees with the real one on real data
  ComplexField rho_c(g);
  for (std::size_t i = 0; i < rho.size(); ++i) rho_c[i] = rho[i];
  ComplexField fc = convolve(a, rho_c);
  RealField fr = convolve(a, rho);
  worst = 0;
  for (std::size_t i = 0; i < fc.size(); ++i) worst = std::max(worst, std::abs(fc[i] - cplx(fr[i])));
  CHECK(worst <= 1e-12);
}

TEST_CASE("spectral round-trip") {
  for (int m : {8, 64, 256, 1024}) {
    GridSpec g(1, m, 3.7);
    ComplexField f = mfld_test::random_field(g, static_cast<std::uint64_t>(m));
    ComplexField back = field_from_coefficients(g, spectral_coefficients(f));
    CHECK(l2_norm(axpy(-1.0, f, back)) / l2_norm(f) <= 1e-12);
  }
}

TEST_CASE("parseval") {
  GridSpec g(1, 64, 2.0);
  ComplexField f = mfld_test::random_field(g, 77);
  std::vector<cplx> coeff = spectral_coefficients(f);
  double spectral = 0;
  for (const cplx& c : coeff) spectral += std::norm(c);
  spectral *= g.volume();
  double direct = l2_norm(f) * l2_norm(f);
  CHECK(std::abs(spectral - direct) / direct <= 1e-12);
}

TEST_CASE("sobolev norms") {
  GridSpec g(1, 32, 2.0);
  ComplexField f = mfld_test::random_field(g, 13);
  CHECK(std::abs(sobolev_norm(f, 0) - l2_norm(f)) <= 1e-14);

  ComplexField c(g);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = cplx(0.4, 0.1);
  double h0 = sobolev_norm(c, 0);
  CHECK(std::abs(sobolev_norm(c, 1) - h0) <= 1e-14);
  CHECK(std::abs(sobolev_norm(c, 2) - h0) <= 1e-14);

  ComplexField p = mfld_test::plane_wave(g, 3);
  double kappa2 = std::pow(2 * kPi * 3 / g.length, 2);
  CHECK(sobolev_norm(p, 1) ==
        doctest::Approx(std::sqrt(1 + kappa2) * sobolev_norm(p, 0)).epsilon(1e-12));
  CHECK(sobolev_norm(p, 2) ==
        doctest::Approx((1 + kappa2) * sobolev_norm(p, 0)).epsilon(1e-12));
  CHECK_THROWS_AS(sobolev_norm(p, 3), parameter_error);
}

TEST_CASE("field algebra") {
  GridSpec g(1, 8, 1.0);
  ComplexField x = mfld_test::random_field(g, 3);
  ComplexField y = mfld_test::random_field(g, 4);
  ComplexField z = axpy(cplx(0.5, -2.0), x, y);
  for (std::size_t i = 0; i < z.size(); ++i)
    CHECK(std::abs(z[i] - (cplx(0.5, -2.0) * x[i] + y[i])) <= 1e-15);

  ComplexField s = x;
  scale(s, cplx(0, 1));
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(s[i] - cplx(0, 1) * x[i]) <= 1e-15);

  ComplexField zero(g);
  CHECK_THROWS_AS(normalize(zero), consistency_error);
  ComplexField u = x;
  scale(u, 3.7);
  normalize(u);
  CHECK(std::abs(l2_norm(u) - 1.0) <= 1e-14);
}
