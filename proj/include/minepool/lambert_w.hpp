#pragma once

// Real branches of the Lambert W function on [-1/e, inf).

namespace minepool {

struct WBranchResult {
  double value = 0.0;
  /// value * e^value - x
  double residual = 0.0;
  int iterations = 0;
};

/// Lower branch W_{-1}: the solution y <= -1 of y e^y = x, for x in
/// [-1/e, 0). Inputs within 1e-14 of -1/e return exactly -1.
WBranchResult lambert_w_minus1(double x);

/// Principal branch W_0: the solution y >= -1 of y e^y = x, for x >= -1/e.
WBranchResult lambert_w_principal(double x);

}  // namespace minepool
