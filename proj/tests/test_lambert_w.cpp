#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "minepool/core_model.hpp"
#include "minepool/lambert_w.hpp"
#include "oracles.hpp"

using namespace minepool;

namespace {

// Lower-branch root of y e^y = x by bisection over [-800, -1].
double bisect_minus1(double x) {
  return oracle::bisect([x](double y) { return y * std::exp(y) - x; }, -800.0, -1.0);
}

}  // namespace

TEST_CASE("W_{-1} reference values") {
  const double inv_e = std::exp(-1.0);
  CHECK(lambert_w_minus1(-inv_e).value == -1.0);

  // Frozen from a 40-digit bisection on y e^y = x.
  const auto a = lambert_w_minus1(-0.1);
  CHECK(a.value == doctest::Approx(-3.577152063957297).epsilon(1e-14));
  CHECK(a.value == doctest::Approx(bisect_minus1(-0.1)).epsilon(1e-13));

  const double x = -0.5 * std::exp(-0.5);
  const auto b = lambert_w_minus1(x);
  CHECK(b.value == doctest::Approx(-1.7564312086261697).epsilon(1e-14));
  CHECK(std::abs(b.residual) <= 1e-12);
}

TEST_CASE("W_0 reference values") {
  CHECK(lambert_w_principal(0.0).value == 0.0);
  CHECK(lambert_w_principal(std::numbers::e).value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lambert_w_principal(-0.3 * std::exp(-0.3)).value ==
        doctest::Approx(-0.3).epsilon(1e-14));
  CHECK(lambert_w_principal(-std::exp(-1.0)).value == -1.0);
  for (double x : {-0.2, 0.5, 3.0, 100.0, 1e10}) {
    const auto w = lambert_w_principal(x);
    CHECK(w.value >= -1.0);
    CHECK(std::abs(w.residual) <= 1e-12 * std::max(1.0, std::abs(x)));
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(lambert_w_minus1(0.0), DomainError);
  CHECK_THROWS_AS(lambert_w_minus1(0.5), DomainError);
  CHECK_THROWS_AS(lambert_w_minus1(-0.4), DomainError);
  CHECK_THROWS_AS(lambert_w_principal(-0.4), DomainError);
}

TEST_CASE("near the branch point") {
  const double bp = -std::exp(-1.0);
  CHECK(lambert_w_minus1(bp + 5e-15).value == -1.0);
  CHECK(lambert_w_minus1(bp - 5e-15).value == -1.0);
  for (double gap : {1e-13, 1e-10, 1e-7, 1e-4}) {
    const auto w = lambert_w_minus1(bp + gap);
    CHECK(w.value < -1.0);
    CHECK(std::abs(w.residual) <= 1e-12);
    const auto w0 = lambert_w_principal(bp + gap);
    CHECK(w0.value > -1.0);
    CHECK(std::abs(w0.residual) <= 1e-12);
  }
}

TEST_CASE("W_{-1} round trip on random inputs") {
  std::mt19937_64 gen(1234);
  const double bp = -std::exp(-1.0);
  std::uniform_real_distribution<double> dist(bp, 0.0);
  for (int i = 0; i < 10000; ++i) {
    double x = dist(gen);
    if (x == bp || x == 0.0) continue;
    const auto w = lambert_w_minus1(x);
    CHECK(w.value <= -1.0);
    CHECK(std::abs(w.value * std::exp(w.value) - x) <= 1e-12);
  }
  // Deep in the tail toward 0-.
  for (double x : {-1e-5, -1e-50, -1e-300}) {
    const auto w = lambert_w_minus1(x);
    CHECK(std::abs(w.residual) <= 1e-12);
    CHECK(w.value == doctest::Approx(bisect_minus1(x)).epsilon(1e-12));
  }
}

TEST_CASE("principal value of -a e^{-a} is -a") {
  for (int i = 1; i < 1000; ++i) {
    const double alpha = i / 1000.0;
    CHECK(std::abs(lambert_w_principal(-alpha * std::exp(-alpha)).value + alpha) <= 1e-10);
  }
}

TEST_CASE("W_{-1} is strictly decreasing") {
  const double bp = -std::exp(-1.0);
  std::vector<double> xs;
  for (int i = 1; i < 2000; ++i) xs.push_back(bp * (1.0 - i / 2000.0));
  std::sort(xs.begin(), xs.end());
  double prev = lambert_w_minus1(xs.front()).value;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double cur = lambert_w_minus1(xs[i]).value;
    CHECK(cur < prev);
    prev = cur;
  }
}
