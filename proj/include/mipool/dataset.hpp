#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mipool/matrix.hpp"

namespace mipool {

// Value stored in every unobserved cell. Consumers branch on the mask; the
// sentinel only guarantees that a missing cell never holds leftover data.
inline constexpr double kMissingSentinel = -9.0e299;

// Row-major boolean mask, true = observed.
class Mask {
 public:
  Mask() = default;
  Mask(std::size_t rows, std::size_t cols, bool observed = true)
      : rows_(rows), cols_(cols), cells_(rows * cols, observed ? 1 : 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool observed(std::size_t r, std::size_t c) const noexcept { return cells_[r * cols_ + c] != 0; }
  void set(std::size_t r, std::size_t c, bool observed) noexcept {
    cells_[r * cols_ + c] = observed ? 1 : 0;
  }
  std::size_t observed_count(std::size_t col) const noexcept;
  bool all_observed() const noexcept;

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> cells_;
};

class IncompleteDataset {
 public:
  // Missing cells of `values` are overwritten with kMissingSentinel. Empty
  // column_names are replaced by V1..Vk.
  IncompleteDataset(Matrix values, Mask mask, std::vector<std::string> column_names = {});

  // Fully observed dataset.
  static IncompleteDataset complete(Matrix values, std::vector<std::string> column_names = {});

  std::size_t rows() const noexcept { return values_.rows(); }
  std::size_t cols() const noexcept { return values_.cols(); }
  const Matrix& values() const noexcept { return values_; }
  const Mask& mask() const noexcept { return mask_; }
  const std::vector<std::string>& column_names() const noexcept { return names_; }
  bool observed(std::size_t r, std::size_t c) const noexcept { return mask_.observed(r, c); }

  std::size_t column_index(const std::string& name) const;

 private:
  Matrix values_;
  Mask mask_;
  std::vector<std::string> names_;
};

// Observed values of one column in row order.
std::vector<double> column_observed_values(const IncompleteDataset& ds, std::size_t col);

// m completed copies of a dataset. The constructor verifies that every
// completion matches the source exactly on observed cells.
class ImputationStack {
 public:
  ImputationStack(const IncompleteDataset& source, std::vector<Matrix> completions);

  std::size_t m() const noexcept { return completions_.size(); }
  const Matrix& completion(std::size_t i) const { return completions_.at(i); }
  const std::vector<Matrix>& completions() const noexcept { return completions_; }
  const Mask& source_mask() const noexcept { return source_mask_; }
  const std::vector<std::string>& column_names() const noexcept { return names_; }

 private:
  std::vector<Matrix> completions_;
  Mask source_mask_;
  std::vector<std::string> names_;
};

struct Estimate {
  double q_hat = 0.0;
  double u_bar = 0.0;
};

// Per-imputation scalar estimates and their variances.
struct RepeatedEstimates {
  std::vector<double> q_hats;
  std::vector<double> u_bars;

  std::size_t m() const noexcept { return q_hats.size(); }
  // Throws unless lengths agree, m >= 2 and all variances are non-negative.
  void validate() const;
};

// Vector-valued counterpart: k-vectors and k x k covariance matrices.
struct RepeatedVectorEstimates {
  std::vector<std::vector<double>> q_hats;
  std::vector<Matrix> u_bars;

  std::size_t m() const noexcept { return q_hats.size(); }
  std::size_t k() const noexcept { return q_hats.empty() ? 0 : q_hats.front().size(); }
  void validate() const;
};

using Analyzer = std::function<Estimate(const Matrix& completion)>;

// Applies `analyzer` to each completion in order. Failures are rethrown as
// mipool::Error carrying the completion index.
RepeatedEstimates stack_estimates(const ImputationStack& stack, const Analyzer& analyzer);

// Column mean with variance s^2 / n (s^2 the unbiased sample variance).
Estimate mean_estimate(const Matrix& completion, std::size_t col);
Analyzer column_mean_analyzer(std::size_t col);

// CSV with a header row; missing cells are written and read as `NA`.
IncompleteDataset read_dataset_csv(std::istream& in);
IncompleteDataset read_dataset_csv(const std::string& path);
void write_dataset_csv(const IncompleteDataset& ds, std::ostream& out);
void write_dataset_csv(const IncompleteDataset& ds, const std::string& path);

}  // namespace mipool
