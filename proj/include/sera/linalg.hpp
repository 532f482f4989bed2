#pragma once

#include <cstdint>
#include <vector>

#include "sera/matrix.hpp"

namespace sera {

// Largest singular value by power iteration on W^T W (two matvecs per step,
// W never squared explicitly). Stops when the Rayleigh quotient moves by less
// than tol relative, then applies one Aitken extrapolation to absorb the slow
// geometric tail that appears when the top two singular values nearly tie.
double operator_norm(const DenseMatrix& w, int max_iter = 200, double tol = 1e-9);

// All singular values, descending, via one-sided Jacobi on the columns of W
// (transposed first if rows < cols). O(min(r,c)^2 * max(r,c)) per sweep;
// intended for weight-matrix scale, not for huge operands.
std::vector<double> singular_values(const DenseMatrix& w);

// Ratio of extreme singular values; +inf when the smallest drops below
// 1e-12 times the largest (or the matrix is zero).
double condition_number(const DenseMatrix& w);

// Divides matrices by their estimated spectral norm, keeping one persistent
// power-iteration vector per slot. The first call on a slot iterates to
// convergence; later calls do a single warm-started update, which tracks the
// small per-step drift an optimizer introduces.
class SpectralNormalizer {
 public:
  explicit SpectralNormalizer(uint64_t seed) : seed_(seed) {}
  // Returns the norm estimate the division used.
  double normalize(std::size_t slot, DenseMatrix& w);

 private:
  struct State {
    std::vector<double> u;  // left vector, size rows
    std::size_t rows = 0, cols = 0;
  };
  uint64_t seed_;
  std::vector<State> states_;
};

}  // namespace sera
