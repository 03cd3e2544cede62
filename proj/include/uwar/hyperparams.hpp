#pragma once

namespace uwar {

// Scalar model constants derived from the discount factor delta and the
// dimension p. All are fixed once (delta, p) are chosen; delta is the only
// free parameter of the evolution.
struct Hyperparams {
  double delta = 0.0;
  int p = 0;
  double n = 0.0;  // (1 - delta)^-1
  double a = 0.0;  // delta (1 - delta)^-1 + p - 1
  int b = 1;
  double k = 0.0;  // (n + p - 1) / (delta n + p - 1)
  double c = 0.0;  // (delta n - 1) / (k (delta n - 2))

  double prior_df() const { return delta * n + p - 1; }    // before the update
  double post_df() const { return n + p - 1; }             // after the update
  double forecast_df() const { return delta * n; }         // one-step Student t
};

/// Builds the derived constants; requires 2/3 < delta < 1 (so that
/// a > p + 1 and c > 0) and p >= 1. Both closed forms of k are computed and
/// must agree to 1e-12.
Hyperparams make_hyperparams(double delta, int p);

}  // namespace uwar
