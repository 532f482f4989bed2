#pragma once

#include <cstddef>
#include <vector>

#include "sera/rng.hpp"

namespace sera {

// Row-major dense matrix of doubles. The heavy products are Eigen-backed in
// the implementation file; the type itself stays a plain buffer so headers
// compile fast and storage can be serialized directly.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix gaussian(std::size_t rows, std::size_t cols, rng::Stream& s,
                              double stddev = 1.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void set_zero();
  bool all_finite() const;
  double frobenius_norm() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);     // A B
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);  // A^T B
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);  // A B^T
DenseMatrix transposed(const DenseMatrix& a);

// y = A^T x and y = A x for vectors, used by the power-iteration paths.
void matvec(const DenseMatrix& a, const double* x, double* y);
void matvec_t(const DenseMatrix& a, const double* x, double* y);

}  // namespace sera
