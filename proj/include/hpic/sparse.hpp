#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace hpic {

// Compressed sparse rows, immutable after construction.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  // Builds from (row, col, value) triplets; duplicates are summed.
  static SparseMatrix from_triplets(
      int n, std::vector<std::tuple<int, int, double>> triplets);

  int size() const { return n_; }
  std::int64_t nnz() const { return static_cast<std::int64_t>(val_.size()); }

  // y = M x, row-parallel (deterministic for any thread count).
  void multiply(const double* x, double* y) const;
  std::vector<double> multiply(const std::vector<double>& x) const;

  double coeff(int row, int col) const;
  std::vector<double> diagonal() const;
  std::vector<double> row_sums() const;

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& cols() const { return col_; }
  const std::vector<double>& values() const { return val_; }

  // Debug text formats: one "row col value" line per entry / one value per
  // line for vectors.
  void write_triplets(std::ostream& os) const;
  static void write_vector(std::ostream& os, const std::vector<double>& v);
  static std::vector<double> read_vector(std::istream& is);

 private:
  int n_ = 0;
  std::vector<int> row_ptr_;
  std::vector<int> col_;
  std::vector<double> val_;
};

}  // namespace hpic
