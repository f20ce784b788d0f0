#include "minepool/lambert_w.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "minepool/core_model.hpp"

namespace minepool {
namespace {

constexpr double kBranchPointTolerance = 1e-14;
constexpr int kMaxIterations = 100;

double branch_point() { return -std::exp(-1.0); }

// Series about the branch point in p = +-sqrt(2(1 + e x)); the sign selects
// the branch (+ for W_0, - for W_{-1}).
double branch_series(double x, double sign) {
  const double q = std::max(0.0, 2.0 * (1.0 + std::numbers::e * x));
  const double p = sign * std::sqrt(q);
  return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
}

// Halley iteration on f(w) = w e^w - x, safeguarded by the bracket
// [lo, hi] which is known to contain the root. `increasing` tells whether
// w e^w increases on the bracket (W_0) or decreases (W_{-1}).
WBranchResult refine(double x, double w, double lo, double hi,
                     bool increasing) {
  WBranchResult out;
  const double tolerance = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(x);
  for (int it = 1; it <= kMaxIterations; ++it) {
    out.iterations = it;
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (std::abs(f) <= tolerance) break;
    // Shrink the bracket around the root.
    if ((f > 0.0) == increasing) {
      hi = w;
    } else {
      lo = w;
    }
    const double wp1 = w + 1.0;
    double next = 0.5 * (lo + hi);
    if (wp1 != 0.0) {
      const double halley = w - f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
      if (halley >= lo && halley <= hi) next = halley;
    }
    const double step = std::abs(next - w);
    w = next;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(w)) break;
  }
  out.value = w;
  out.residual = w * std::exp(w) - x;
  return out;
}

}  // namespace

WBranchResult lambert_w_minus1(double x) {
  const double bp = branch_point();
  if (!(x >= bp - kBranchPointTolerance && x < 0.0)) {
    throw DomainError("W_{-1} is defined on [-1/e, 0)");
  }
  if (std::abs(x - bp) <= kBranchPointTolerance) {
    return {.value = -1.0, .residual = -std::exp(-1.0) - x, .iterations = 0};
  }
  // Writing x = -e^{-1-s}, W_{-1}(x) lies in (-1 - sqrt(2s) - s, -1].
  const double s = -1.0 - std::log(-x);
  const double lo = -1.0 - std::sqrt(2.0 * s) - s - 1.0;
  const double hi = -1.0;

  double guess;
  if (x < -0.25) {
    guess = branch_series(x, -1.0);
  } else {
    const double l1 = std::log(-x);
    const double l2 = std::log(-l1);
    guess = l1 - l2 + l2 / l1;
  }
  if (!(guess > lo && guess < hi)) guess = 0.5 * (lo + hi);
  return refine(x, guess, lo, hi, /*increasing=*/false);
}

WBranchResult lambert_w_principal(double x) {
  const double bp = branch_point();
  if (!(x >= bp - kBranchPointTolerance)) {
    throw DomainError("W_0 is defined on [-1/e, inf)");
  }
  if (std::abs(x - bp) <= kBranchPointTolerance) {
    return {.value = -1.0, .residual = -std::exp(-1.0) - x, .iterations = 0};
  }
  if (x == 0.0) return {};

  double lo;
  double hi;
  double guess;
  if (x < 0.0) {
    lo = -1.0;
    hi = 0.0;
    guess = x < -0.25 ? branch_series(x, 1.0) : x * (1.0 - x);
  } else if (x <= std::numbers::e) {
    lo = 0.0;
    hi = 1.0 + 1e-12;
    guess = std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    lo = 1.0 - 1e-12;
    hi = l1;
    guess = l1 - l2 + l2 / l1;
  }
  if (!(guess > lo && guess < hi)) guess = 0.5 * (lo + hi);
  return refine(x, guess, lo, hi, /*increasing=*/true);
}

}  // namespace minepool
