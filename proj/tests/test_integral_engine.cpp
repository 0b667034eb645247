#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "regconv/corpus.hpp"
#include "regconv/integral_table.hpp"

using namespace regconv;

namespace {

IntegrandSource ones_2d() {
  IntegrandSource s;
  s.dim = 2;
  s.label = "ones";
  s.eval = [](std::span<const double>) { return Complex{1.0, 0.0}; };
  return s;
}

IntegrandSource expo(int m) {
  IntegrandSource s;
  s.dim = m;
  s.label = "expo";
  s.abs_integrable = true;
  s.eval = [m](std::span<const double> t) {
    double total = 0.0;
    for (int p = 0; p < m; ++p) total += t[static_cast<std::size_t>(p)];
    return Complex{std::exp(-total), 0.0};
  };
  return s;
}

double expo_box(double a1, double b1, double a2, double b2) {
  return (std::exp(-a1) - std::exp(-b1)) * (std::exp(-a2) - std::exp(-b2));
}

}  // namespace

TEST_CASE("rectangular integrals of the constant integrand measure area") {
  const IntegralTable t(ones_2d(), QuadParams{0.5, 4}, MultiIndex{8, 8});
  const double v[] = {1.3, 2.1};
  CHECK(t.rect_integral(v).real() == doctest::Approx(1.3 * 2.1).epsilon(1e-13));
}

TEST_CASE("rectangular integrals of the exponential match the closed form") {
  const IntegralTable t(expo(2), QuadParams{0.5, 8}, MultiIndex{16, 16});
  for (double v : {0.5, 1.0, 2.7, 6.3}) {
    const double coords[] = {v, v};
    const double closed = (1.0 - std::exp(-v)) * (1.0 - std::exp(-v));
    CHECK(std::abs(t.rect_integral(coords).real() - closed) <= 1e-10);
  }
}

TEST_CASE("zero coordinates give exactly zero") {
  const IntegralTable t(expo(2), QuadParams{0.5, 4}, MultiIndex{8, 8});
  const double v[] = {0.0, 3.0};
  CHECK(t.rect_integral(v) == Complex{0.0, 0.0});
}

TEST_CASE("queries beyond the gridded horizon are rejected") {
  const IntegralTable t(expo(2), QuadParams{0.5, 4}, MultiIndex{8, 8});
  const double v[] = {4.5, 1.0};
  CHECK_THROWS_AS(t.rect_integral(v), std::out_of_range);
}

TEST_CASE("subrectangular integrals: lo = 0 reduction is bit-for-bit") {
  const IntegralTable t(expo(2), QuadParams{0.5, 6}, MultiIndex{12, 12});
  for (double v : {1.0, 2.3, 4.9}) {
    const double coords[] = {v, v * 0.7};
    CHECK(t.subrect_integral(RealBox({0.0, 0.0}, {v, v * 0.7})) == t.rect_integral(coords));
  }
}

TEST_CASE("degenerate subrectangles vanish") {
  const IntegralTable t(expo(2), QuadParams{0.5, 4}, MultiIndex{8, 8});
  CHECK(t.subrect_integral(RealBox({1.0, 0.5}, {1.0, 3.0})) == Complex{0.0, 0.0});
}

TEST_CASE("subrectangular integrals match the separable closed form, on and off grid") {
  const IntegralTable t(expo(2), QuadParams{0.5, 8}, MultiIndex{16, 16});
  const struct {
    double a1, b1, a2, b2;
  } boxes[] = {
      {0.5, 2.0, 1.0, 3.0},       // on-grid
      {0.3, 1.7, 0.9, 2.45},      // fully off-grid
      {0.0, 7.83, 0.01, 7.99},    // near the horizon
      {1.25, 1.35, 2.0, 2.0001},  // thin boxes
  };
  for (const auto& b : boxes) {
    const Complex got = t.subrect_integral(RealBox({b.a1, b.a2}, {b.b1, b.b2}));
    CHECK(std::abs(got.real() - expo_box(b.a1, b.b1, b.a2, b.b2)) <= 1e-10);
  }
}

TEST_CASE("additivity: exact at cell boundaries, tiny inside cells") {
  const IntegralTable t(expo(2), QuadParams{0.5, 8}, MultiIndex{16, 16});
  const RealBox box({0.5, 1.0}, {3.5, 4.0});
  // split on a cell boundary: pure cache arithmetic
  CHECK(t.additivity_check(box, 0, 2.0) <= 1e-14);
  // splits inside cells
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pick(0.6, 3.4);
  for (int i = 0; i < 20; ++i) {
    const double residual = t.additivity_check(box, 0, pick(rng));
    const double scale = std::abs(t.subrect_integral(box));
    CHECK(residual <= 1e-10 * scale);
  }
}

TEST_CASE("integral pringsheim: exponential settles at 1, constant diverges") {
  const IntegralTable expo_t(expo(2), QuadParams{0.5, 8}, MultiIndex{32, 32});
  const Verdict ve = expo_t.pringsheim_diagnose(1e-4);
  REQUIRE(ve.status == Status::satisfied_at_horizon);
  CHECK(std::abs(*ve.estimate - 1.0) <= 1e-4);
  REQUIRE(ve.real_witness.has_value());
  CHECK(*ve.real_witness <= 12.0);

  const IntegralTable ones_t(ones_2d(), QuadParams{0.5, 4}, MultiIndex{16, 16});
  CHECK(ones_t.pringsheim_diagnose(1.0).status == Status::violated);
}

TEST_CASE("integral pringsheim: conditionally convergent product approaches its oracle square") {
  const auto* entry = find_integrand("cond", 2);
  REQUIRE(entry);
  const IntegralTable t(entry->source, entry->params, entry->test_cells);
  const Verdict v = t.pringsheim_diagnose(0.1);
  REQUIRE(v.status == Status::satisfied_at_horizon);
  const double g = oracles::cond_factor_oracle();
  CHECK(std::abs(v.estimate->real() - g * g) <= 0.1);
  // The frozen corpus constant agrees with the oracle.
  CHECK(std::abs(g - kCondFactor1D) <= 1e-9);
}

TEST_CASE("integral regular: exponential tails satisfied, conditional product satisfied") {
  const IntegralTable expo_t(expo(2), QuadParams{0.5, 6}, MultiIndex{32, 32});
  const Verdict ve = expo_t.regular_diagnose(1e-3);
  CHECK(ve.status == Status::satisfied_at_horizon);

  const auto* entry = find_integrand("cond", 2);
  REQUIRE(entry);
  const IntegralTable cond_t(entry->source, entry->params, entry->test_cells);
  const Verdict vc = cond_t.regular_diagnose(0.1);
  CHECK(vc.status == Status::satisfied_at_horizon);
}

TEST_CASE("integral regular: non-decaying strips are violated with a witness box") {
  const auto* entry = find_integrand("strip-violator", 2);
  REQUIRE(entry);
  const IntegralTable t(entry->source, entry->params, entry->test_cells);
  const Verdict v = t.regular_diagnose(1.0);
  REQUIRE(v.status == Status::violated);
  REQUIRE(v.real_box_lo.has_value());
  const Complex at_witness =
      t.subrect_integral(RealBox(*v.real_box_lo, *v.real_box_hi));
  CHECK(std::abs(at_witness) >= 1.0);
}

TEST_CASE("the absolutely-integrable side of the conditional product fails (converse gap)") {
  const auto* entry = find_integrand("cond", 2);
  REQUIRE(entry);
  const IntegralTable abs_t(abs_integrand(entry->source), entry->params, entry->test_cells);
  CHECK(abs_t.regular_diagnose(0.1).status == Status::violated);
}

TEST_CASE("grid refinement: halving delta moves smooth answers only marginally") {
  const IntegralTable coarse(expo(2), QuadParams{1.0, 8}, MultiIndex{8, 8});
  const IntegralTable fine(expo(2), QuadParams{0.5, 8}, MultiIndex{16, 16});
  const double v[] = {7.3, 5.1};
  CHECK(std::abs(coarse.rect_integral(v) - fine.rect_integral(v)) <= 1e-9);
}

TEST_CASE("symmetric adapter: odd integrands fold to exact zero") {
  IntegrandSource odd;
  odd.dim = 2;
  odd.label = "odd";
  odd.eval = [](std::span<const double> t) { return Complex{t[0] * std::exp(-t[1] * t[1]), 0.0}; };
  const auto adapter = make_symmetric_adapter(odd, QuadParams{0.5, 4}, MultiIndex{8, 8});
  const double v[] = {3.0, 3.0};
  CHECK(adapter.folded.rect_integral(v) == Complex{0.0, 0.0});
}

TEST_CASE("symmetric adapter: two-sided exponential matches 4(1-e^{-v})^2") {
  IntegrandSource f;
  f.dim = 2;
  f.label = "abs-expo";
  f.eval = [](std::span<const double> t) {
    return Complex{std::exp(-std::abs(t[0]) - std::abs(t[1])), 0.0};
  };
  const auto adapter = make_symmetric_adapter(f, QuadParams{0.5, 8}, MultiIndex{8, 8});
  for (double v : {1.0, 2.5, 4.0}) {
    const double coords[] = {v, v};
    const double closed = 4.0 * std::pow(1.0 - std::exp(-v), 2);
    CHECK(std::abs(adapter.folded.rect_integral(coords).real() - closed) <= 1e-10);
  }
}

TEST_CASE("symmetric adapter: even integrands agree with the direct two-sided rule") {
  IntegrandSource f;
  f.dim = 2;
  f.label = "even";
  f.eval = [](std::span<const double> t) {
    return Complex{std::cos(t[0]) * std::exp(-t[1] * t[1]) + 0.1 * t[0] * t[0], 0.0};
  };
  const auto adapter = make_symmetric_adapter(f, QuadParams{0.5, 8}, MultiIndex{6, 6});
  for (double v : {1.0, 2.0, 3.0}) {
    const double coords[] = {v, v};
    const Complex folded = adapter.folded.rect_integral(coords);
    const Complex direct = adapter.direct_symmetric_integral(coords);
    CHECK(std::abs(folded - direct) <= 1e-10 * std::max(1.0, std::abs(direct)));
  }
}
