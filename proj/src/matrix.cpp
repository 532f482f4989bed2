#include "sera/matrix.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace sera {

namespace {
using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Map = Eigen::Map<EMat>;
using CMap = Eigen::Map<const EMat>;

CMap view(const DenseMatrix& m) { return CMap(m.data().data(), m.rows(), m.cols()); }
Map view(DenseMatrix& m) { return Map(m.data().data(), m.rows(), m.cols()); }
}  // namespace

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::gaussian(std::size_t rows, std::size_t cols, rng::Stream& s,
                                  double stddev) {
  DenseMatrix m(rows, cols);
  rng::fill_gaussian(s, m.data_.data(), m.data_.size());
  if (stddev != 1.0)
    for (double& v : m.data_) v *= stddev;
  return m;
}

void DenseMatrix::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

bool DenseMatrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

double DenseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

static void require_compatible(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string("matmul dimension mismatch: ") + what);
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require_compatible(a.cols(), b.rows(), "A.cols != B.rows");
  DenseMatrix c(a.rows(), b.cols());
  view(c).noalias() = view(a) * view(b);
  return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  require_compatible(a.rows(), b.rows(), "A.rows != B.rows");
  DenseMatrix c(a.cols(), b.cols());
  view(c).noalias() = view(a).transpose() * view(b);
  return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  require_compatible(a.cols(), b.cols(), "A.cols != B.cols");
  DenseMatrix c(a.rows(), b.rows());
  view(c).noalias() = view(a) * view(b).transpose();
  return c;
}

DenseMatrix transposed(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  view(t) = view(a).transpose();
  return t;
}

void matvec(const DenseMatrix& a, const double* x, double* y) {
  Eigen::Map<Eigen::VectorXd>(y, a.rows()).noalias() =
      view(a) * Eigen::Map<const Eigen::VectorXd>(x, a.cols());
}

void matvec_t(const DenseMatrix& a, const double* x, double* y) {
  Eigen::Map<Eigen::VectorXd>(y, a.cols()).noalias() =
      view(a).transpose() * Eigen::Map<const Eigen::VectorXd>(x, a.rows());
}

}  // namespace sera
