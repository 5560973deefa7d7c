#include "tsdist/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tsdist/error.hpp"

namespace tsdist::linalg {

namespace {

void check_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) fail(errc::invalid_argument, "matrix entry is not finite");
}

void require_square(const Matrix& a, const char* op) {
  if (!a.is_square())
    fail(errc::not_square, std::string(op) + " requires a square matrix, got " +
                               std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

constexpr double kMaxAsymmetry = 1e-8;
constexpr double kConvergenceScale = 1e-12;
constexpr int kMaxSweeps = 100;
constexpr double kPsdClampScale = 1e-8;

// (A + A^T)/2 after checking the asymmetry budget.
Matrix symmetrized(const Matrix& a, const char* op) {
  require_square(a, op);
  const std::size_t n = a.rows();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
  if (worst > kMaxAsymmetry)
    fail(errc::asymmetry_too_large,
         std::string(op) + ": max |a_ij - a_ji| = " + std::to_string(worst));
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = 0.5 * (a(i, j) + a(j, i));
  return b;
}

double frobenius(const Matrix& a) {
  double s = 0.0;
  for (double x : a.data()) s += x * x;
  return std::sqrt(s);
}

double off_diagonal_frobenius(const Matrix& a) {
  const std::size_t n = a.rows();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

// Cyclic Jacobi on a symmetric matrix. A is destroyed (diagonal becomes the
// eigenvalues); vt, when non-null, accumulates the rotations with
// eigenvectors stored as ROWS so every update touches contiguous memory.
int jacobi_iterate(Matrix& a, Matrix* vt) {
  const std::size_t n = a.rows();
  if (vt) *vt = Matrix::identity(n);
  const double tol = kConvergenceScale * std::max(frobenius(a), 1.0);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_frobenius(a) <= tol) return sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        double* rp = a.row(p);
        double* rq = a.row(q);
        const double app = rp[p];
        const double aqq = rq[q];
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = rp[i];
          const double aiq = rq[i];
          rp[i] = c * aip - s * aiq;
          rq[i] = s * aip + c * aiq;
        }
        // the rotated 2x2 block, written directly for exactness
        rp[p] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
        rq[q] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
        rp[q] = 0.0;
        rq[p] = 0.0;
        // restore symmetry by mirroring the two rows into their columns
        for (std::size_t i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          a(i, p) = rp[i];
          a(i, q) = rq[i];
        }

        if (vt) {
          double* vp = vt->row(p);
          double* vq = vt->row(q);
          for (std::size_t i = 0; i < n; ++i) {
            const double x = vp[i];
            const double y = vq[i];
            vp[i] = c * x - s * y;
            vq[i] = s * x + c * y;
          }
        }
      }
    }
  }
  if (off_diagonal_frobenius(a) <= tol) return kMaxSweeps;
  fail(errc::no_convergence,
       "Jacobi iteration did not converge in " + std::to_string(kMaxSweeps) + " sweeps");
}

// Sort eigenvalues descending and fix eigenvector signs so the first
// component of meaningful magnitude is positive. vt rows are eigenvectors.
void canonicalize(std::vector<double>& values, Matrix& vt) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] > values[j]; });

  std::vector<double> sorted_values(n);
  Matrix sorted_vt(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    sorted_values[k] = values[src];
    const double* from = vt.row(src);
    double* to = sorted_vt.row(k);
    std::copy(from, from + n, to);

    double flip = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(to[i]) > 1e-12) {
        flip = to[i] > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    if (flip < 0.0)
      for (std::size_t i = 0; i < n; ++i) to[i] = -to[i];
  }
  values = std::move(sorted_values);
  vt = std::move(sorted_vt);
}

// Householder tridiagonalization (Martin/Reinsch/Wilkinson lineage). On
// return d holds the diagonal, e the subdiagonal (e[0..n-2]); when
// reflector_h is non-null, the scaled reflector vectors stay in the rows of
// `a` and reflector_h[i] holds the corresponding h (0 = no reflector).
void householder_tridiagonalize(Matrix& a, std::vector<double>& d, std::vector<double>& e,
                                std::vector<double>* reflector_h) {
  const std::size_t n = a.rows();
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  if (reflector_h) reflector_h->assign(n, 0.0);
  if (n == 1) {
    d[0] = a(0, 0);
    return;
  }

  for (std::size_t i = n - 1; i >= 1; --i) {
    const std::size_t l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        const double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          double gg = 0.0;
          for (std::size_t k = 0; k <= j; ++k) gg += a(j, k) * a(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) gg += a(k, j) * a(i, k);
          e[j] = gg / h;
          f += e[j] * a(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = a(i, j);
          const double gg = e[j] - hh * f;
          e[j] = gg;
          for (std::size_t k = 0; k <= j; ++k) a(j, k) -= f * e[k] + gg * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
    if (reflector_h) (*reflector_h)[i] = h;
    if (i == 1) break;
  }
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
}

// Q^T for the accumulated reflectors: zt rows end up as the columns of
// Q = H_{n-1} ... H_1. Applying each H = I - v v^T / h on the left of zt
// streams whole rows, keeping the access contiguous.
Matrix reflectors_to_zt(const Matrix& a, const std::vector<double>& reflector_h) {
  const std::size_t n = a.rows();
  Matrix zt = Matrix::identity(n);
  std::vector<double> w(n);
  for (std::size_t i = n - 1; i >= 2; --i) {
    const double h = reflector_h[i];
    if (h == 0.0) continue;
    const std::size_t l = i - 1;  // reflector support 0..l
    const double* v = a.row(i);
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t r = 0; r <= l; ++r) {
      const double vr = v[r];
      if (vr == 0.0) continue;
      const double* zrow = zt.row(r);
      for (std::size_t c = 0; c < n; ++c) w[c] += vr * zrow[c];
    }
    const double inv_h = 1.0 / h;
    for (std::size_t r = 0; r <= l; ++r) {
      const double f = v[r] * inv_h;
      if (f == 0.0) continue;
      double* zrow = zt.row(r);
      for (std::size_t c = 0; c < n; ++c) zrow[c] -= f * w[c];
    }
  }
  return zt;
}

// implicit-shift QL on a (d, e) tridiagonal; zt, when non-null, accumulates
// the rotations with eigenvectors as rows
void ql_implicit(std::vector<double>& d, std::vector<double>& e, Matrix* zt) {
  const std::size_t n = d.size();
  constexpr double eps = 2.220446049250313e-16;
  for (std::size_t l = 0; l < n; ++l) {
    int iterations = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iterations++ == 50)
          fail(errc::no_convergence, "QL eigenvalue iteration exceeded 50 shifts");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t ii = m; ii-- > l;) {
          double f = s * e[ii];
          const double b = c * e[ii];
          r = std::hypot(f, g);
          e[ii + 1] = r;
          if (r == 0.0) {
            d[ii + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[ii + 1] - p;
          r = (d[ii] - g) * s + 2.0 * c * b;
          p = s * r;
          d[ii + 1] = g + p;
          g = c * r - b;
          if (zt) {
            double* zi = zt->row(ii);
            double* zi1 = zt->row(ii + 1);
            const std::size_t cols = zt->cols();
            for (std::size_t k = 0; k < cols; ++k) {
              const double fk = zi1[k];
              zi1[k] = s * zi[k] + c * fk;
              zi[k] = c * zi[k] - s * fk;
            }
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

namespace detail {

std::vector<double> eigenvalues_of_symmetric(Matrix a) {
  if (a.rows() == 1) return {a(0, 0)};
  std::vector<double> d, e;
  householder_tridiagonalize(a, d, e, nullptr);
  ql_implicit(d, e, nullptr);
  std::sort(d.begin(), d.end(), std::greater<double>());
  return d;
}

EigenDecomposition eigen_of_symmetric(Matrix a) {
  const std::size_t n = a.rows();
  if (n == 1) return EigenDecomposition{{a(0, 0)}, Matrix::identity(1)};
  std::vector<double> d, e, hs;
  householder_tridiagonalize(a, d, e, &hs);
  Matrix zt = reflectors_to_zt(a, hs);
  ql_implicit(d, e, &zt);
  canonicalize(d, zt);
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) v(i, j) = zt(j, i);
  return EigenDecomposition{std::move(d), std::move(v)};
}

}  // namespace detail

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0)
    fail(errc::invalid_argument, "matrix dimensions must be at least 1x1");
  v_.assign(rows * cols, 0.0);
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  if (r == 0) fail(errc::invalid_argument, "matrix dimensions must be at least 1x1");
  const std::size_t c = rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) fail(errc::invalid_argument, "ragged rows in matrix literal");
    std::size_t j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  check_finite(m.v_);
  return m;
}

Matrix Matrix::from_data(std::size_t rows, std::size_t cols, std::vector<double> entries) {
  if (entries.size() != rows * cols)
    fail(errc::invalid_argument, "entry count does not match matrix shape");
  Matrix m(rows, cols);
  m.v_ = std::move(entries);
  check_finite(m.v_);
  return m;
}

double Matrix::max_abs_diff(const Matrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    fail(errc::shape_mismatch, "max_abs_diff on differently shaped matrices");
  double worst = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i)
    worst = std::max(worst, std::abs(v_[i] - other.v_[i]));
  return worst;
}

EigenDecomposition sym_eigen(const Matrix& a) {
  Matrix work = symmetrized(a, "sym_eigen");
  const std::size_t n = work.rows();

  Matrix vt;
  jacobi_iterate(work, &vt);

  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = work(i, i);
  canonicalize(values, vt);

  // transpose: rows of vt are eigenvectors, the public shape is columns
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) v(i, j) = vt(j, i);
  return EigenDecomposition{std::move(values), std::move(v)};
}

std::vector<double> sym_eigenvalues(const Matrix& a) {
  return detail::eigenvalues_of_symmetric(symmetrized(a, "sym_eigenvalues"));
}

Matrix psd_sqrt(const Matrix& a) {
  EigenDecomposition eig = detail::eigen_of_symmetric(symmetrized(a, "psd_sqrt"));
  const std::size_t n = eig.eigenvalues.size();
  const double lambda_max = std::max(eig.eigenvalues.front(), 0.0);
  const double clamp_floor = -kPsdClampScale * lambda_max;

  std::vector<double> roots(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = eig.eigenvalues[i];
    if (lambda < clamp_floor)
      fail(errc::not_psd, "eigenvalue " + std::to_string(lambda) + " below clamp threshold " +
                              std::to_string(clamp_floor));
    roots[i] = lambda > 0.0 ? std::sqrt(lambda) : 0.0;
  }

  // S = V diag(roots) V^T, then exact symmetrization of rounding residue
  const Matrix& v = eig.eigenvectors;
  Matrix scaled(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) scaled(i, k) = v(i, k) * roots[k];
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* srow = scaled.row(i);
    double* out = s.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double* vrow = v.row(j);  // row j of V = column j of V^T
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += srow[k] * vrow[k];
      out[j] = acc;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double m = 0.5 * (s(i, j) + s(j, i));
      s(i, j) = m;
      s(j, i) = m;
    }
  return s;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.empty() || b.empty()) fail(errc::shape_mismatch, "matmul on empty matrix");
  if (a.cols() != b.rows())
    fail(errc::shape_mismatch, "matmul shapes " + std::to_string(a.rows()) + "x" +
                                   std::to_string(a.cols()) + " and " + std::to_string(b.rows()) +
                                   "x" + std::to_string(b.cols()));
  Matrix c(a.rows(), b.cols());
  const std::size_t n = a.rows(), k_dim = a.cols(), m = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double* crow = c.row(i);
    const double* arow = a.row(i);
    for (std::size_t k = 0; k < k_dim; ++k) {
      const double f = arow[k];
      const double* brow = b.row(k);
      for (std::size_t j = 0; j < m; ++j) crow[j] += f * brow[j];
    }
  }
  for (double x : c.data())
    if (!std::isfinite(x)) fail(errc::invalid_argument, "matmul produced non-finite entries");
  return c;
}

double trace(const Matrix& a) {
  require_square(a, "trace");
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, i);
  return s;
}

}  // namespace tsdist::linalg
