#include "sera/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sera {

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

bool normalize_vec(std::vector<double>& v) {
  const double n = norm2(v);
  if (n < 1e-300) return false;
  for (double& x : v) x /= n;
  return true;
}

constexpr uint64_t kOpnormKey = 0x6f706e6f726dull;

}  // namespace

double operator_norm(const DenseMatrix& w, int max_iter, double tol) {
  if (w.rows() == 0 || w.cols() == 0) return 0.0;
  rng::Stream s(kOpnormKey, {w.rows(), w.cols()});
  std::vector<double> v(w.cols()), av(w.rows());
  rng::fill_gaussian(s, v.data(), v.size());
  if (!normalize_vec(v)) return 0.0;

  double rho = 0.0, prev = 0.0, prev_delta = 0.0, aitken = 0.0;
  for (int k = 0; k < max_iter; ++k) {
    matvec(w, v.data(), av.data());
    double r = 0.0;
    for (double x : av) r += x * x;  // Rayleigh quotient of W^T W at unit v
    matvec_t(w, av.data(), v.data());
    if (!normalize_vec(v)) return 0.0;

    const double delta = r - rho;
    prev = rho;
    rho = r;
    if (k > 0 && std::abs(delta) <= tol * std::max(rho, 1.0)) {
      // Geometric-tail extrapolation: when the quotient still creeps with a
      // stable ratio q, the limit is rho + delta * q / (1 - q).
      if (prev_delta != 0.0) {
        const double q = delta / prev_delta;
        if (q > 0.0 && q < 1.0) aitken = delta * q / (1.0 - q);
      }
      break;
    }
    prev_delta = delta;
  }
  (void)prev;
  return std::sqrt(std::max(0.0, rho + aitken));
}

std::vector<double> singular_values(const DenseMatrix& w) {
  // Work on columns of the taller orientation.
  DenseMatrix a = w.rows() >= w.cols() ? w : transposed(w);
  const std::size_t m = a.rows(), n = a.cols();
  // Column-major copy for contiguous column access.
  std::vector<double> col(m * n);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) col[c * m + r] = a(r, c);

  constexpr int kMaxSweeps = 60;
  constexpr double kTol = 1e-14;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double *ci = &col[i * m], *cj = &col[j * m];
        double aii = 0.0, ajj = 0.0, aij = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
          aii += ci[r] * ci[r];
          ajj += cj[r] * cj[r];
          aij += ci[r] * cj[r];
        }
        if (std::abs(aij) <= kTol * std::sqrt(aii * ajj) || aij == 0.0) continue;
        const double zeta = (ajj - aii) / (2.0 * aij);
        const double t = std::copysign(1.0, zeta) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        for (std::size_t r = 0; r < m; ++r) {
          const double vi = ci[r], vj = cj[r];
          ci[r] = cs * vi - sn * vj;
          cj[r] = sn * vi + cs * vj;
        }
        rotated = true;
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sv(n);
  for (std::size_t c = 0; c < n; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < m; ++r) s += col[c * m + r] * col[c * m + r];
    sv[c] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

double condition_number(const DenseMatrix& w) {
  const auto sv = singular_values(w);
  const double hi = sv.front(), lo = sv.back();
  if (hi == 0.0 || lo < 1e-12 * hi) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

double SpectralNormalizer::normalize(std::size_t slot, DenseMatrix& w) {
  if (slot >= states_.size()) states_.resize(slot + 1);
  State& st = states_[slot];
  const bool fresh = st.rows != w.rows() || st.cols != w.cols();
  if (fresh) {
    st.rows = w.rows();
    st.cols = w.cols();
    st.u.assign(st.rows, 0.0);
    rng::Stream s(seed_, {0x736e2d75ull, slot});
    rng::fill_gaussian(s, st.u.data(), st.u.size());
    if (!normalize_vec(st.u)) return 0.0;
  }

  std::vector<double> v(st.cols);
  double sigma = 0.0;
  const int rounds = fresh ? 100 : 1;
  double prev = -1.0;
  for (int k = 0; k < rounds; ++k) {
    matvec_t(w, st.u.data(), v.data());
    if (!normalize_vec(v)) return 0.0;  // zero matrix: leave w untouched
    matvec(w, v.data(), st.u.data());
    const double wn = norm2(st.u);
    if (wn < 1e-300) return 0.0;
    for (double& x : st.u) x /= wn;
    sigma = wn;  // u^T W v with both unit: equals |W v|
    if (prev >= 0.0 && std::abs(sigma - prev) <= 1e-8 * std::max(sigma, 1.0)) break;
    prev = sigma;
  }
  if (sigma < 1e-300) return 0.0;
  for (double& x : w.data()) x /= sigma;
  return sigma;
}

}  // namespace sera
