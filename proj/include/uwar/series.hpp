#pragma once

#include <string>
#include <vector>

#include "uwar/linalg.hpp"

namespace uwar {

enum class ReturnKind { kLog, kArithmetic, kPrecomputed };

// Analysis-ready return series: the burn-in window has already been consumed
// into the sample estimates of mu and Sigma_0.
struct ReturnSeries {
  std::vector<std::string> dates;        // one per analysis row
  std::vector<std::string> asset_names;  // p column labels from the header
  Matrix values;                         // N x p analysis returns
  Vector mu_hat;
  Matrix sigma0_hat;
  ReturnKind kind = ReturnKind::kLog;
  int burn_in = 0;                       // number of returns consumed
};

/// Parses a CSV with a header row, a leading date column and p numeric
/// columns (prices, or returns when kind is kPrecomputed). Log/arithmetic
/// returns are differenced from prices, losing one row. The first `burn_in`
/// returns calibrate (mu_hat, sigma0_hat); the rest form the analysis
/// series. Rejects ragged rows, missing or non-numeric cells, non-positive
/// prices under log returns, and burn-in windows too short for a positive
/// definite covariance.
ReturnSeries ingest_prices(const std::string& csv_path, ReturnKind kind, int burn_in);

/// Same, from an already-loaded CSV text (used by tests).
ReturnSeries ingest_prices_text(const std::string& csv_text, ReturnKind kind, int burn_in);

}  // namespace uwar
