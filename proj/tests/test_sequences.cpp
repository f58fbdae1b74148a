#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "hdtk/sequences.hpp"
#include "oracles.hpp"

using namespace hdtk;
constexpr double kPi = std::numbers::pi;

namespace {

SequenceSpec oscillation(int d, Index3 k, bool real_form, std::optional<GridFunction> a = {}) {
  SequenceSpec s;
  s.kind = SequenceKind::modulated_oscillation;
  s.dim = d;
  s.k = k;
  s.real_form = real_form;
  s.amplitude = std::move(a);
  s.n_schedule = {8, 16, 32, 64};
  return s;
}

}  // namespace

TEST(SequenceKind, NamesRoundTrip) {
  for (auto k : {SequenceKind::modulated_oscillation, SequenceKind::concentration, SequenceKind::pair_oscillation,
                 SequenceKind::custom})
    EXPECT_EQ(parse_sequence_kind(to_string(k)), k);
  EXPECT_THROW(parse_sequence_kind("spiral"), std::invalid_argument);
}

TEST(Generate, PureMode) {
  const auto u = generate(oscillation(1, {1, 0, 0}, false), 4, 64);
  for (std::size_t i = 0; i < u.size(); ++i)
    EXPECT_NEAR(std::abs(u[i] - std::polar(1.0, 8 * kPi * u.point(i)[0])), 0.0, 1e-14);
}

TEST(Generate, RealFormAndMeanZero) {
  const auto a = periodic_bump(2, 128, {0.5, 0.25, 0}, 2);
  const auto u = generate(oscillation(2, {1, -1, 0}, true, a), 8, 128);
  EXPECT_TRUE(u.is_real());
  EXPECT_NEAR(std::abs(mean(u)), 0.0, 1e-15);
  // band 2 amplitude times a mode at 8 (1,-1): exact mean zero before subtraction too
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Vec x = u.point(i);
    EXPECT_NEAR(u[i].real(), std::sqrt(2.0) * a[i].real() * std::cos(2 * kPi * 8 * (x[0] - x[1])), 1e-13);
  }
}

TEST(Generate, WeaklyNull) {
  const int n_grid = 1024;
  const auto a = periodic_bump(1, n_grid, {0.4, 0, 0}, 3);
  const auto g = make_grid_function(1, n_grid, [](const Vec& x) { return Complex{std::exp(std::sin(2 * kPi * x[0])), 0}; });
  const SequenceSpec s = oscillation(1, {1, 0, 0}, true, a);
  std::vector<double> vals;
  for (int n : {8, 16, 32, 64}) vals.push_back(std::abs(pair(generate(s, n, n_grid), g, false)));
  EXPECT_LE(vals.back(), 0.05 * lp_norm(g, 2.0) * lp_norm(a, 2.0));
  EXPECT_LE(vals.back(), vals.front());
}

TEST(Generate, OscillationNormsIndependentOfN) {
  // 4096 points keep at least 32 samples per period, so the grid norm tracks the continuum one
  const auto a = periodic_bump(1, 4096, {0.3, 0, 0}, 2);
  const SequenceSpec s = oscillation(1, {2, 0, 0}, true, a);
  for (double p : {1.5, 2.0, 4.0}) {
    const double ref = lp_norm(generate(s, 8, 4096), p);
    for (int n : {16, 32, 64}) EXPECT_NEAR(lp_norm(generate(s, n, 4096), p) / ref, 1.0, 0.01) << "p=" << p;
  }
}

TEST(Generate, ConcentrationKeepsL2Norm) {
  SequenceSpec s;
  s.kind = SequenceKind::concentration;
  s.dim = 1;
  s.p = 2.0;
  s.width = 0.25;
  s.center = {0.5, 0, 0};
  s.n_schedule = {4, 8};
  const double n4 = lp_norm(generate(s, 4, 1024), 2.0);
  const double n8 = lp_norm(generate(s, 8, 1024), 2.0);
  EXPECT_NEAR(n8 / n4, 1.0, 0.02);
  // |U(n.)|_2^2 = int U^2 / n; the n^(1/2) prefactor cancels it
  const auto hat = mexican_hat(1, 0.25);
  const double l2 = oracle::simpson([&](double y) { return std::pow(hat({y, 0, 0}), 2); }, -4, 4, 20000);
  EXPECT_NEAR(n8 * n8, l2, 1e-6 * l2);
  // concentrating too little spreads mass over the periodic images
  s.width = 2.0;
  EXPECT_THROW(generate(s, 4, 1024), std::invalid_argument);
  // concentrating too much leaves the band limit
  s.width = 0.25;
  EXPECT_THROW(generate(s, 200, 1024), std::invalid_argument);
}

TEST(Generate, BandLimitAndValidation) {
  SequenceSpec s = oscillation(1, {4, 0, 0}, true);
  EXPECT_THROW(validate(s, 1024), std::invalid_argument);  // 64 * 4 = N/4
  EXPECT_NO_THROW(validate(s, 2048));
  s.k = {0, 0, 0};
  EXPECT_THROW(validate(s, 2048), std::invalid_argument);
  SequenceSpec c;
  c.kind = SequenceKind::concentration;
  c.p = 1.0;
  EXPECT_THROW(validate(c, 64), std::invalid_argument);
  SequenceSpec order = oscillation(1, {1, 0, 0}, true);
  order.n_schedule = {8, 8, 16};
  EXPECT_THROW(validate(order, 1024), std::invalid_argument);
  SequenceSpec custom;
  custom.kind = SequenceKind::custom;
  EXPECT_THROW(validate(custom, 64), std::invalid_argument);
  custom.generator = [](int n, int N) { return GridFunction::constant(1, N, double(n)); };
  EXPECT_NEAR(std::abs(mean(generate(custom, 3, 64))), 0.0, 1e-15);
  try {
    validate(s, 64);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_EQ(std::string(e.what()).substr(0, 2), "k:");
  }
}

TEST(Truncate, Examples) {
  const double l = 1.5;
  const auto small = make_grid_function(1, 64, [](const Vec& x) { return Complex{std::sin(2 * kPi * x[0]), 0}; });
  EXPECT_EQ(max_abs_difference(truncate(small, l), small), 0.0);
  EXPECT_EQ(lp_norm(truncate(GridFunction::constant(1, 16, 2 * l), l), 1.0), 0.0);
  const auto f = make_grid_function(1, 64, [](const Vec& x) { return Complex{3 * std::cos(2 * kPi * x[0]), 0}; });
  const auto t = truncate(f, l);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = f[i].real();
    EXPECT_EQ(t[i].real(), std::abs(v) > l ? 0.0 : v);
  }
  EXPECT_THROW(truncate(GridFunction::constant(1, 8, Complex{0, 1}), 1.0), std::invalid_argument);
  EXPECT_THROW(truncate(f, 0.0), std::invalid_argument);
}

TEST(Truncate, Properties) {
  std::mt19937_64 rng(12);
  const auto phi = periodic_bump(2, 32, {0.5, 0.5, 0}, 2);
  const auto phi2 = phi * phi;
  for (int t = 0; t < 20; ++t) {
    const auto f = oracle::random_real(2, 32, rng, 1.5);
    for (double l : {0.5, 1.0, 2.0}) {
      const auto tl = truncate(f, l);
      EXPECT_EQ(max_abs_difference(truncate(tl, l), tl), 0.0);
      for (double p : {1.0, 2.0, 3.0, std::numeric_limits<double>::infinity()}) EXPECT_LE(lp_norm(tl, p), lp_norm(f, p));
      EXPECT_EQ(max_abs_difference(f * tl, tl * tl), 0.0);
      EXPECT_EQ(pair(phi2 * f, tl, false), pair(phi2 * tl, tl, false));
    }
  }
}

TEST(ConvergenceInMeasure, Examples) {
  const auto u = GridFunction::constant(1, 64, 0.0);
  const auto g = make_grid_function(1, 64, [](const Vec& x) { return Complex{std::cos(2 * kPi * x[0]) + 2.0, 0}; });
  for (double f : convergence_in_measure({g, g}, g, 0.1)) EXPECT_EQ(f, 0.0);

  std::vector<GridFunction> shrink;
  for (int n = 1; n <= 64; n *= 2) shrink.push_back(Complex{1.0 / n, 0} * g);
  const auto fr = convergence_in_measure(shrink, u, 0.1);
  EXPECT_GT(fr.front(), 0.0);
  EXPECT_EQ(fr.back(), 0.0);

  const int n_grid = 1024;
  const SequenceSpec s = oscillation(1, {1, 0, 0}, true);
  std::vector<GridFunction> seq;
  for (int n : {8, 16, 32, 64}) seq.push_back(generate(s, n, n_grid));
  const auto frac = convergence_in_measure(seq, GridFunction::zeros(1, n_grid), 0.5);
  const double analytic = 2.0 / kPi * std::acos(0.5 / std::sqrt(2.0));
  const int ns[4] = {8, 16, 32, 64};
  for (int i = 0; i < 4; ++i) {
    int count = 0;
    for (int m = 0; m < n_grid; ++m)
      if (std::abs(std::sqrt(2.0) * std::cos(2 * kPi * double(ns[i]) * m / n_grid)) > 0.5) ++count;
    EXPECT_DOUBLE_EQ(frac[i], double(count) / n_grid);
  }
  // 128 samples per period at n = 8
  EXPECT_NEAR(frac[0], analytic, 0.01);
  EXPECT_THROW(convergence_in_measure({g}, GridFunction::zeros(1, 32), 0.1), std::invalid_argument);
}

TEST(MexicanHat, MeanZeroProfile) {
  const auto h = mexican_hat(1, 0.5);
  EXPECT_NEAR(oracle::simpson([&](double y) { return h({y, 0, 0}); }, -6, 6, 4000), 0.0, 1e-12);
  const auto h2 = mexican_hat(2, 1.0);
  // radial integral: int_0^inf (2 - 2 pi r^2) exp(-pi r^2) 2 pi r dr = 0
  EXPECT_NEAR(oracle::simpson([&](double r) { return h2({r, 0, 0}) * 2 * kPi * r; }, 0, 8, 40000), 0.0, 1e-12);
}
