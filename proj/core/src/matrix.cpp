#include "hdpid/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hdpid {

Mat::Mat(std::size_t rows, std::size_t cols, std::initializer_list<double> vals)
    : rows_(rows), cols_(cols), data_(vals) {
  if (data_.size() != rows * cols) throw InvalidInput("Mat: initializer size mismatch");
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::diag(const Vec& d) {
  Mat m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Mat Mat::transpose() const {
  Mat t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Mat::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Mat::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Mat& Mat::operator+=(const Mat& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidInput("Mat: shape mismatch in +");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

Mat& Mat::operator-=(const Mat& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidInput("Mat: shape mismatch in -");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols_ != b.rows_) throw InvalidInput("Mat: shape mismatch in *");
  Mat c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vec operator*(const Mat& a, const Vec& x) {
  if (a.cols_ != x.size()) throw InvalidInput("Mat: shape mismatch in M*v");
  Vec y(a.rows_, 0.0);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t j = 0; j < a.cols_; ++j) y[i] += a(i, j) * x[j];
  return y;
}

double dot(const Vec& a, const Vec& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

double trace(const Mat& a) {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
  return t;
}

Mat sym2(const Mat& a) { return a + a.transpose(); }

SymMatrix::SymMatrix(Mat a) : m_(std::move(a)) {
  if (m_.rows() != m_.cols()) throw InvalidInput("SymMatrix: not square");
  if (!m_.all_finite()) throw InvalidInput("SymMatrix: non-finite entries");
  const double scale = std::max(1.0, m_.max_abs());
  for (std::size_t i = 0; i < m_.rows(); ++i)
    for (std::size_t j = i + 1; j < m_.cols(); ++j) {
      if (std::abs(m_(i, j) - m_(j, i)) > 1e-8 * scale)
        throw InvalidInput("SymMatrix: asymmetry beyond tolerance");
      const double avg = 0.5 * (m_(i, j) + m_(j, i));
      m_(i, j) = m_(j, i) = avg;
    }
}

EigDecomposition sym_eig(const SymMatrix& sa) {
  const std::size_t n = sa.dim();
  Mat a = sa.mat();
  Mat v = Mat::identity(n);

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
  };

  const double scale = std::max(1.0, a.max_abs());
  // Cyclic sweeps; convergence is quadratic so 30 sweeps is far beyond need.
  for (int sweep = 0; sweep < 100 && off_norm() > 1e-14 * scale; ++sweep) {
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigDecomposition d;
  d.eigenvalues.resize(n);
  d.eigenvectors = Mat(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    d.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) d.eigenvectors(i, k) = v(i, order[k]);
  }
  return d;
}

std::optional<Mat> cholesky(const SymMatrix& sa) {
  const std::size_t n = sa.dim();
  Mat l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = sa(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= 0.0) return std::nullopt;
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = sa(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

Vec solve_spd(const SymMatrix& a, const Vec& b) {
  auto l = cholesky(a);
  if (!l) throw NotPositiveDefinite("solve_spd: matrix is not positive definite");
  const std::size_t n = a.dim();
  Vec y(b);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= (*l)(i, k) * y[k];
    y[i] /= (*l)(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < n; ++k) y[ii] -= (*l)(k, ii) * y[k];
    y[ii] /= (*l)(ii, ii);
  }
  return y;
}

double spectral_norm(const Mat& m) {
  if (!m.all_finite()) throw InvalidInput("spectral_norm: non-finite entries");
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  SymMatrix mtm(m.transpose() * m);
  auto d = sym_eig(mtm);
  return std::sqrt(std::max(0.0, d.eigenvalues.back()));
}

Vec solve_lu(Mat a, Vec b) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw InvalidInput("solve_lu: shape mismatch");
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) < 1e-300) throw InvalidInput("solve_lu: singular matrix");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      a(i, k) = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = ii + 1; j < n; ++j) b[ii] -= a(ii, j) * b[j];
    b[ii] /= a(ii, ii);
  }
  return b;
}

Mat inverse(const Mat& a) {
  const std::size_t n = a.rows();
  Mat inv(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec e(n, 0.0);
    e[j] = 1.0;
    Vec col = solve_lu(a, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

double cond2(const Mat& a) { return spectral_norm(a) * spectral_norm(inverse(a)); }

namespace {

// Characteristic polynomial coefficients c[0..n], p(x) = sum c[k] x^k with
// c[n] = 1, by the Faddeev-LeVerrier recurrence.
Vec char_poly(const Mat& a) {
  const std::size_t n = a.rows();
  Vec c(n + 1, 0.0);
  c[n] = 1.0;
  Mat m = Mat::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    m = a * m;
    const double ck = -trace(m) / static_cast<double>(k);
    c[n - k] = ck;
    for (std::size_t i = 0; i < n; ++i) m(i, i) += ck;
  }
  return c;
}

}  // namespace

std::vector<std::complex<double>> eigenvalues_general(const Mat& a) {
  if (a.rows() != a.cols()) throw InvalidInput("eigenvalues_general: not square");
  if (!a.all_finite()) throw InvalidInput("eigenvalues_general: non-finite entries");
  const std::size_t n = a.rows();
  if (n == 0) return {};

  // Scale to unit norm so the polynomial coefficients stay well-ranged.
  const double scale = std::max(spectral_norm(sym2(a) * 0.5) + a.max_abs(), 1e-30);
  Mat as = a * (1.0 / scale);
  Vec c = char_poly(as);

  using C = std::complex<double>;
  auto poly = [&](C x) {
    C p = 0.0;
    for (std::size_t k = n + 1; k-- > 0;) p = p * x + c[k];
    return p;
  };
  auto dpoly = [&](C x) {
    C p = 0.0;
    for (std::size_t k = n + 1; k-- > 1;) p = p * x + c[k] * static_cast<double>(k);
    return p;
  };

  // Aberth-Ehrlich from a slightly rotated circle of starting points.
  std::vector<C> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ang = 2.0 * M_PI * (static_cast<double>(i) + 0.35) / static_cast<double>(n) + 0.4;
    z[i] = C(1.2 * std::cos(ang), 1.2 * std::sin(ang));
  }
  // A root is accepted once the Aberth step stalls below 1e-14 or the
  // residual reaches rounding level for the evaluated polynomial. The
  // residual test matters for multiple roots, where the step size converges
  // only linearly and never reaches the step threshold.
  auto residual_ok = [&](C x) {
    double bound = 0.0, ax = std::abs(x), pw = 1.0;
    for (std::size_t k = 0; k <= n; ++k) {
      bound += std::abs(c[k]) * pw;
      pw *= ax;
    }
    return std::abs(poly(x)) <= 1e-12 * std::max(bound, 1e-30);
  };
  bool converged = false;
  for (int it = 0; it < 400 && !converged; ++it) {
    converged = true;
    for (std::size_t i = 0; i < n; ++i) {
      const C p = poly(z[i]);
      const C dp = dpoly(z[i]);
      C ratio = (std::abs(dp) > 1e-300) ? p / dp : C(1e-3, 1e-3);
      C s = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) s += 1.0 / (z[i] - z[j]);
      const C denom = 1.0 - ratio * s;
      const C step = (std::abs(denom) > 1e-300) ? ratio / denom : ratio;
      z[i] -= step;
      if (std::abs(step) > 1e-14 * std::max(1.0, std::abs(z[i])) && !residual_ok(z[i]))
        converged = false;
    }
  }
  if (!converged) throw InvalidInput("eigenvalues_general: root iteration failed to converge");

  for (auto& zi : z) {
    // Collapse numerically-real roots onto the real axis.
    if (std::abs(zi.imag()) < 1e-9 * std::max(1.0, std::abs(zi.real()))) zi = C(zi.real(), 0.0);
    zi *= scale;
  }
  std::sort(z.begin(), z.end(), [](const C& x, const C& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return z;
}

}  // namespace hdpid
