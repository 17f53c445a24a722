#include "hpic/sparse.hpp"

#include <algorithm>
#include <cinttypes>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "hpic/io.hpp"

namespace hpic {

SparseMatrix SparseMatrix::from_triplets(
    int n, std::vector<std::tuple<int, int, double>> triplets) {
  std::sort(triplets.begin(), triplets.end(),
            [](const auto& a, const auto& b) {
              return std::tie(std::get<0>(a), std::get<1>(a)) <
                     std::tie(std::get<0>(b), std::get<1>(b));
            });

  SparseMatrix m;
  m.n_ = n;
  m.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t i = 0; i < triplets.size();) {
    const int r = std::get<0>(triplets[i]);
    const int c = std::get<1>(triplets[i]);
    double v = 0.0;
    while (i < triplets.size() && std::get<0>(triplets[i]) == r &&
           std::get<1>(triplets[i]) == c) {
      v += std::get<2>(triplets[i]);
      ++i;
    }
    m.col_.push_back(c);
    m.val_.push_back(v);
    ++m.row_ptr_[static_cast<std::size_t>(r) + 1];
  }
  for (int r = 0; r < n; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

void SparseMatrix::multiply(const double* x, double* y) const {
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n_; ++r) {
    double s = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += val_[k] * x[col_[k]];
    y[r] = s;
  }
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("spmv: size mismatch");
  std::vector<double> y(x.size());
  multiply(x.data(), y.data());
  return y;
}

double SparseMatrix::coeff(int row, int col) const {
  for (int k = row_ptr_[row]; k < row_ptr_[row + 1]; ++k) {
    if (col_[k] == col) return val_[k];
  }
  return 0.0;
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(n_));
  for (int r = 0; r < n_; ++r) d[r] = coeff(r, r);
  return d;
}

std::vector<double> SparseMatrix::row_sums() const {
  std::vector<double> s(static_cast<std::size_t>(n_), 0.0);
  for (int r = 0; r < n_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s[r] += val_[k];
  }
  return s;
}

void SparseMatrix::write_triplets(std::ostream& os) const {
  for (int r = 0; r < n_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      os << r << ' ' << col_[k] << ' ' << format_double(val_[k]) << '\n';
    }
  }
}

void SparseMatrix::write_vector(std::ostream& os, const std::vector<double>& v) {
  for (const double x : v) os << format_double(x) << '\n';
}

std::vector<double> SparseMatrix::read_vector(std::istream& is) {
  std::vector<double> v;
  double x;
  while (is >> x) v.push_back(x);
  return v;
}

}  // namespace hpic
