#include "mipool/dataset.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

namespace mipool {

std::size_t Mask::observed_count(std::size_t col) const noexcept {
  std::size_t n = 0;
  for (std::size_t r = 0; r < rows_; ++r) n += observed(r, col) ? 1 : 0;
  return n;
}

bool Mask::all_observed() const noexcept {
  for (auto c : cells_)
    if (c == 0) return false;
  return true;
}

IncompleteDataset::IncompleteDataset(Matrix values, Mask mask, std::vector<std::string> column_names)
    : values_(std::move(values)), mask_(std::move(mask)), names_(std::move(column_names)) {
  if (values_.rows() == 0 || values_.cols() == 0)
    throw Error("IncompleteDataset: need at least one row and one column");
  if (mask_.rows() != values_.rows() || mask_.cols() != values_.cols())
    throw Error("IncompleteDataset: mask and values dimensions differ");
  if (names_.empty()) {
    for (std::size_t c = 0; c < values_.cols(); ++c) names_.push_back("V" + std::to_string(c + 1));
  } else if (names_.size() != values_.cols()) {
    throw Error("IncompleteDataset: column name count differs from column count");
  }
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols(); ++c)
      if (!mask_.observed(r, c)) values_(r, c) = kMissingSentinel;
}

IncompleteDataset IncompleteDataset::complete(Matrix values, std::vector<std::string> column_names) {
  Mask mask(values.rows(), values.cols(), true);
  return IncompleteDataset(std::move(values), std::move(mask), std::move(column_names));
}

std::size_t IncompleteDataset::column_index(const std::string& name) const {
  for (std::size_t c = 0; c < names_.size(); ++c)
    if (names_[c] == name) return c;
  throw Error("IncompleteDataset: no column named '" + name + "'");
}

std::vector<double> column_observed_values(const IncompleteDataset& ds, std::size_t col) {
  if (col >= ds.cols())
    throw Error("column_observed_values: column index " + std::to_string(col) + " out of range");
  std::vector<double> out;
  for (std::size_t r = 0; r < ds.rows(); ++r)
    if (ds.observed(r, col)) out.push_back(ds.values()(r, col));
  return out;
}

ImputationStack::ImputationStack(const IncompleteDataset& source, std::vector<Matrix> completions)
    : completions_(std::move(completions)), source_mask_(source.mask()), names_(source.column_names()) {
  if (completions_.size() < 2) throw Error("ImputationStack: need m >= 2 completions");
  for (std::size_t i = 0; i < completions_.size(); ++i) {
    const Matrix& c = completions_[i];
    if (c.rows() != source.rows() || c.cols() != source.cols())
      throw Error("ImputationStack: completion " + std::to_string(i) + " has wrong dimensions");
    for (std::size_t r = 0; r < c.rows(); ++r)
      for (std::size_t j = 0; j < c.cols(); ++j)
        if (source.observed(r, j) && c(r, j) != source.values()(r, j))
          throw Error("ImputationStack: completion " + std::to_string(i) +
                      " alters an observed cell");
  }
}

void RepeatedEstimates::validate() const {
  if (q_hats.size() != u_bars.size())
    throw Error("RepeatedEstimates: q_hats and u_bars differ in length");
  if (q_hats.size() < 2) throw Error("RepeatedEstimates: need m >= 2 estimates");
  for (double u : u_bars)
    if (!(u >= 0.0)) throw Error("RepeatedEstimates: variances must be non-negative");
}

void RepeatedVectorEstimates::validate() const {
  if (q_hats.size() != u_bars.size())
    throw Error("RepeatedVectorEstimates: q_hats and u_bars differ in length");
  if (q_hats.size() < 2) throw Error("RepeatedVectorEstimates: need m >= 2 estimates");
  const std::size_t dim = k();
  if (dim == 0) throw Error("RepeatedVectorEstimates: empty estimate vectors");
  for (std::size_t l = 0; l < q_hats.size(); ++l) {
    if (q_hats[l].size() != dim)
      throw Error("RepeatedVectorEstimates: estimate " + std::to_string(l) + " has wrong length");
    const Matrix& u = u_bars[l];
    if (u.rows() != dim || u.cols() != dim)
      throw Error("RepeatedVectorEstimates: covariance " + std::to_string(l) + " has wrong shape");
    for (std::size_t i = 0; i < dim; ++i) {
      if (!(u(i, i) >= 0.0))
        throw Error("RepeatedVectorEstimates: negative variance in covariance " + std::to_string(l));
      for (std::size_t j = 0; j < i; ++j)
        if (u(i, j) != u(j, i))
          throw Error("RepeatedVectorEstimates: covariance " + std::to_string(l) + " is not symmetric");
    }
  }
}

RepeatedEstimates stack_estimates(const ImputationStack& stack, const Analyzer& analyzer) {
  RepeatedEstimates est;
  est.q_hats.reserve(stack.m());
  est.u_bars.reserve(stack.m());
  for (std::size_t i = 0; i < stack.m(); ++i) {
    Estimate e;
    try {
      e = analyzer(stack.completion(i));
    } catch (const std::exception& ex) {
      throw Error("analysis of completion " + std::to_string(i) + " failed: " + ex.what());
    }
    est.q_hats.push_back(e.q_hat);
    est.u_bars.push_back(e.u_bar);
  }
  return est;
}

Estimate mean_estimate(const Matrix& completion, std::size_t col) {
  const std::size_t n = completion.rows();
  if (col >= completion.cols()) throw Error("mean_estimate: column index out of range");
  if (n < 2) throw Error("mean_estimate: need at least two rows for a variance");
  double sum = 0.0;
  for (std::size_t r = 0; r < n; ++r) sum += completion(r, col);
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double d = completion(r, col) - mean;
    ss += d * d;
  }
  const double s2 = ss / static_cast<double>(n - 1);
  return {mean, s2 / static_cast<double>(n)};
}

Analyzer column_mean_analyzer(std::size_t col) {
  return [col](const Matrix& completion) { return mean_estimate(completion, col); };
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

IncompleteDataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("read_dataset_csv: empty input");
  std::vector<std::string> names = split_csv_line(line);
  const std::size_t k = names.size();
  std::vector<double> values;
  std::vector<bool> observed;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() != k)
      throw Error("read_dataset_csv: line " + std::to_string(rows + 2) + " has " +
                  std::to_string(fields.size()) + " fields, expected " + std::to_string(k));
    for (const auto& f : fields) {
      if (f == "NA") {
        values.push_back(kMissingSentinel);
        observed.push_back(false);
        continue;
      }
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size())
        throw Error("read_dataset_csv: cannot parse '" + f + "' on line " + std::to_string(rows + 2));
      values.push_back(v);
      observed.push_back(true);
    }
    ++rows;
  }
  Matrix m(rows, k);
  Mask mask(rows, k);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < k; ++c) {
      m(r, c) = values[r * k + c];
      mask.set(r, c, observed[r * k + c]);
    }
  return IncompleteDataset(std::move(m), std::move(mask), std::move(names));
}

IncompleteDataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_dataset_csv: cannot open '" + path + "'");
  return read_dataset_csv(in);
}

void write_dataset_csv(const IncompleteDataset& ds, std::ostream& out) {
  for (std::size_t c = 0; c < ds.cols(); ++c) out << (c ? "," : "") << ds.column_names()[c];
  out << '\n';
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    for (std::size_t c = 0; c < ds.cols(); ++c) {
      if (c) out << ',';
      out << (ds.observed(r, c) ? format_double(ds.values()(r, c)) : std::string("NA"));
    }
    out << '\n';
  }
}

void write_dataset_csv(const IncompleteDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_dataset_csv: cannot open '" + path + "' for writing");
  write_dataset_csv(ds, out);
  if (!out) throw Error("write_dataset_csv: write to '" + path + "' failed");
}

}  // namespace mipool
