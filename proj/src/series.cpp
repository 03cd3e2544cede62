#include "uwar/series.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace uwar {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, Eigen::Index row, Eigen::Index col) {
  if (cell.empty())
    throw std::invalid_argument("ingest: missing value at row " + std::to_string(row) +
                                ", column " + std::to_string(col));
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  // Allow trailing whitespace only.
  while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
  if (pos != cell.size() || !std::isfinite(v))
    throw std::invalid_argument("ingest: non-numeric value '" + cell + "' at row " +
                                std::to_string(row) + ", column " + std::to_string(col));
  return v;
}

}  // namespace

ReturnSeries ingest_prices_text(const std::string& csv_text, ReturnKind kind, int burn_in) {
  if (burn_in < 1) throw std::invalid_argument("ingest: burn_in must be >= 1");
  std::stringstream ss(csv_text);
  std::string line;
  if (!std::getline(ss, line)) throw std::invalid_argument("ingest: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.size() < 2) throw std::invalid_argument("ingest: need a date column and p series");
  const auto p = static_cast<Eigen::Index>(header.size()) - 1;

  std::vector<std::string> dates;
  std::vector<Vector> rows;
  Eigen::Index row_no = 0;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row_no;
    const auto cells = split_csv_line(line);
    if (static_cast<Eigen::Index>(cells.size()) != p + 1)
      throw std::invalid_argument("ingest: ragged row " + std::to_string(row_no) + " (" +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(p + 1) + ")");
    Vector v(p);
    for (Eigen::Index j = 0; j < p; ++j) v(j) = parse_cell(cells[static_cast<size_t>(j + 1)], row_no, j + 1);
    dates.push_back(cells.front());
    rows.push_back(std::move(v));
  }

  // Returns and their date labels (the later row for differenced prices).
  Matrix returns;
  std::vector<std::string> return_dates;
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  if (kind == ReturnKind::kPrecomputed) {
    returns.resize(n_rows, p);
    for (Eigen::Index i = 0; i < n_rows; ++i) returns.row(i) = rows[static_cast<size_t>(i)];
    return_dates = dates;
  } else {
    if (n_rows < 2) throw std::invalid_argument("ingest: need at least two price rows");
    returns.resize(n_rows - 1, p);
    for (Eigen::Index i = 1; i < n_rows; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        const double prev = rows[static_cast<size_t>(i - 1)](j);
        const double cur = rows[static_cast<size_t>(i)](j);
        if (kind == ReturnKind::kLog) {
          if (!(prev > 0.0) || !(cur > 0.0))
            throw std::invalid_argument("ingest: non-positive price under log returns at row " +
                                        std::to_string(i + 1));
          returns(i - 1, j) = std::log(cur) - std::log(prev);
        } else {
          if (prev == 0.0)
            throw std::invalid_argument("ingest: zero price under arithmetic returns at row " +
                                        std::to_string(i + 1));
          returns(i - 1, j) = cur / prev - 1.0;
        }
      }
      return_dates.push_back(dates[static_cast<size_t>(i)]);
    }
  }

  const Eigen::Index n_returns = returns.rows();
  if (burn_in >= n_returns)
    throw std::invalid_argument("ingest: burn-in consumes the whole series (" +
                                std::to_string(n_returns) + " returns)");
  if (burn_in < static_cast<int>(p) + 1)
    throw std::invalid_argument("ingest: burn-in too short for a positive definite covariance");

  const Matrix burn = returns.topRows(burn_in);
  ReturnSeries out;
  out.kind = kind;
  out.burn_in = burn_in;
  out.asset_names.assign(header.begin() + 1, header.end());
  out.mu_hat = burn.colwise().mean();
  const Matrix centered = burn.rowwise() - out.mu_hat.transpose();
  out.sigma0_hat = (centered.transpose() * centered) / static_cast<double>(burn_in - 1);
  choleski_upper(out.sigma0_hat);  // must be positive definite
  out.values = returns.bottomRows(n_returns - burn_in);
  out.dates.assign(return_dates.begin() + burn_in, return_dates.end());
  return out;
}

ReturnSeries ingest_prices(const std::string& csv_path, ReturnKind kind, int burn_in) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw std::invalid_argument("ingest: cannot open " + csv_path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ingest_prices_text(buf.str(), kind, burn_in);
}

}  // namespace uwar
