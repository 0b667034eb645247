#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "regconv/quadrature.hpp"

using namespace regconv;

namespace {

IntegrandSource constant(int m, double c) {
  IntegrandSource s;
  s.dim = m;
  s.label = "const";
  s.eval = [c](std::span<const double>) { return Complex{c, 0.0}; };
  return s;
}

IntegrandSource expo(int m) {
  IntegrandSource s;
  s.dim = m;
  s.label = "expo";
  s.eval = [m](std::span<const double> t) {
    double total = 0.0;
    for (int p = 0; p < m; ++p) total += t[static_cast<std::size_t>(p)];
    return Complex{std::exp(-total), 0.0};
  };
  return s;
}

}  // namespace

TEST_CASE("gauss-legendre nodes and weights match the classical values") {
  const auto& r2 = gauss_legendre(2);
  CHECK(r2.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r2.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r2.weights[0] == doctest::Approx(1.0).epsilon(1e-15));

  const auto& r3 = gauss_legendre(3);
  CHECK(r3.nodes[1] == 0.0);
  CHECK(std::abs(r3.nodes[2] - std::sqrt(0.6)) < 1e-15);
  CHECK(r3.weights[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  CHECK(r3.weights[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-15));

  // Weights sum to the interval length for a spread of orders.
  for (int q : {1, 4, 7, 8, 12, 16}) {
    const auto& r = gauss_legendre(q);
    double total = 0.0;
    for (double w : r.weights) total += w;
    CHECK(total == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("constant cells integrate to their volume") {
  const QuadParams params{0.5, 3};
  for (std::int64_t c1 : {0, 1, 5}) {
    const Complex v = cell_integral(constant(2, 1.0), MultiIndex{c1, 2}, params);
    CHECK(v.real() == doctest::Approx(0.25).epsilon(1e-15));
  }
}

TEST_CASE("linear integrand is exact at every order") {
  IntegrandSource lin;
  lin.dim = 1;
  lin.label = "t";
  lin.eval = [](std::span<const double> t) { return Complex{t[0], 0.0}; };
  for (int q : {1, 2, 5}) {
    const QuadParams params{1.0, q};
    CHECK(cell_integral(lin, MultiIndex{0}, params).real() ==
          doctest::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("separable exponential over the unit square") {
  const QuadParams params{1.0, 8};
  const double closed = (1.0 - std::exp(-1.0)) * (1.0 - std::exp(-1.0));
  const Complex v = cell_integral(expo(2), MultiIndex{0, 0}, params);
  CHECK(std::abs(v.real() - closed) <= 1e-10);
}

TEST_CASE("polynomial exactness up to degree 2q-1 per axis") {
  for (int q : {2, 4, 6}) {
    const QuadParams params{1.0, q};
    const std::vector<int> exps{2 * q - 1, q};
    IntegrandSource mono;
    mono.dim = 2;
    mono.label = "monomial";
    mono.eval = [exps](std::span<const double> t) {
      return Complex{std::pow(t[0], exps[0]) * std::pow(t[1], exps[1]), 0.0};
    };
    const MultiIndex cell{1, 2};
    const std::vector<double> lo{1.0, 2.0}, hi{2.0, 3.0};
    const double exact = oracles::monomial_box_integral(exps, lo, hi);
    const Complex v = cell_integral(mono, cell, params);
    CHECK(std::abs(v.real() - exact) <= 1e-11 * std::abs(exact));
  }
}

TEST_CASE("partial cell integrals: full sub-box equals the cell, volume for constants") {
  const QuadParams params{0.5, 4};
  const MultiIndex cell{2, 3};
  const RealBox full({1.0, 1.5}, {1.5, 2.0});
  CHECK(partial_cell_integral(expo(2), cell, full, params) ==
        cell_integral(expo(2), cell, params));

  const RealBox sub({1.1, 1.6}, {1.3, 1.9});
  const Complex v = partial_cell_integral(constant(2, 1.0), cell, sub, params);
  CHECK(v.real() == doctest::Approx(0.2 * 0.3).epsilon(1e-13));

  CHECK_THROWS_AS(partial_cell_integral(expo(2), cell, RealBox({0.4, 1.5}, {1.5, 2.0}), params),
                  std::invalid_argument);
}

TEST_CASE("splitting a cell at an interior plane reproduces the whole") {
  const QuadParams params{0.5, 8};
  const MultiIndex cell{1, 1};
  const Complex whole = cell_integral(expo(2), cell, params);
  for (double split : {0.6, 0.75, 0.9}) {
    const Complex left =
        partial_cell_integral(expo(2), cell, RealBox({0.5, 0.5}, {split, 1.0}), params);
    const Complex right =
        partial_cell_integral(expo(2), cell, RealBox({split, 0.5}, {1.0, 1.0}), params);
    CHECK(std::abs(whole - (left + right)) <= 1e-12 * std::abs(whole));
  }
}

TEST_CASE("panel grid caching is transparent and execution-order independent") {
  const QuadParams params{0.5, 6};
  const MultiIndex cells{6, 5};
  const PanelGrid par(expo(2), params, cells, Exec::parallel);
  const PanelGrid ser(expo(2), params, cells, Exec::serial);
  for_each_index(LatticeBox(MultiIndex::zeros(2), MultiIndex{5, 4}), [&](const MultiIndex& c) {
    const Complex cached = par.cell_value(c);
    CHECK(cached == ser.cell_value(c));
    CHECK(cached == cell_integral(expo(2), c, params));
  });
  CHECK_THROWS_AS(par.cell_value(MultiIndex{6, 0}), std::out_of_range);
}

TEST_CASE("oscillatory integrands must declare a period and respect delta <= period/4") {
  IntegrandSource osc;
  osc.dim = 1;
  osc.label = "sin";
  osc.smoothness = Smoothness::oscillatory;
  osc.eval = [](std::span<const double> t) { return Complex{std::sin(t[0]), 0.0}; };
  const QuadParams params{0.5, 4};
  CHECK_THROWS_AS(cell_integral(osc, MultiIndex{0}, params), std::invalid_argument);
  osc.period = 2.0 * M_PI;
  CHECK_NOTHROW(cell_integral(osc, MultiIndex{0}, params));
  const QuadParams coarse{2.0, 4};
  CHECK_THROWS_AS(cell_integral(osc, MultiIndex{0}, coarse), std::invalid_argument);
}

TEST_CASE("non-finite integrand values raise an error naming the point") {
  IntegrandSource bad;
  bad.dim = 1;
  bad.label = "pole";
  bad.eval = [](std::span<const double> t) { return Complex{1.0 / (t[0] - t[0]), 0.0}; };
  const QuadParams params{1.0, 2};
  CHECK_THROWS_AS(cell_integral(bad, MultiIndex{0}, params), EvalError);
}
