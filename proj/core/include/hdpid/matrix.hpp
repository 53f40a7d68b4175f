#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdpid {

using Vec = std::vector<double>;

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotPositiveDefinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dense row-major real matrix. Small fixed sizes only (everything in this
/// project is at most ~12x12), so no effort is spent on blocking or sparsity.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Mat(std::size_t rows, std::size_t cols, std::initializer_list<double> vals);

  static Mat identity(std::size_t n);
  static Mat diag(const Vec& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const Vec& data() const { return data_; }

  Mat transpose() const;
  bool all_finite() const;
  double max_abs() const;

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(double s);

  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator*(Mat a, double s) { return a *= s; }
  friend Mat operator*(double s, Mat a) { return a *= s; }
  Mat operator-() const { return *this * -1.0; }

  friend Mat operator*(const Mat& a, const Mat& b);
  friend Vec operator*(const Mat& a, const Vec& x);

 private:
  std::size_t rows_ = 0, cols_ = 0;
  Vec data_;
};

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);
double trace(const Mat& a);

/// A + A^T.
Mat sym2(const Mat& a);

/// Symmetric matrix wrapper. Construction symmetrizes as (A+A^T)/2 and
/// rejects asymmetry beyond 1e-8*||A|| (floating-point assembly of the LMI
/// blocks produces tiny asymmetry; anything bigger is a caller bug).
class SymMatrix {
 public:
  explicit SymMatrix(Mat a);

  std::size_t dim() const { return m_.rows(); }
  const Mat& mat() const { return m_; }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

 private:
  Mat m_;
};

struct EigDecomposition {
  Vec eigenvalues;   // ascending
  Mat eigenvectors;  // orthonormal columns, A*v_k = lambda_k*v_k
};

/// Full spectrum of a symmetric matrix by cyclic Jacobi rotations.
EigDecomposition sym_eig(const SymMatrix& a);

/// Lower-triangular L with L*L^T = A, or nullopt when a pivot is <= 0.
/// The nullopt path is the positive-definiteness test used by the barrier
/// method, not an error condition.
std::optional<Mat> cholesky(const SymMatrix& a);

/// Solve A*x = b for symmetric positive definite A. Throws
/// NotPositiveDefinite when the factorization fails.
Vec solve_spd(const SymMatrix& a, const Vec& b);

/// sqrt(lambda_max(M^T M)).
double spectral_norm(const Mat& m);

/// General square solve / inverse by partially pivoted LU.
Vec solve_lu(Mat a, Vec b);
Mat inverse(const Mat& a);

/// 2-norm condition number estimate via spectral norms of A and A^{-1}.
double cond2(const Mat& a);

/// Eigenvalues of a general real square matrix: characteristic polynomial by
/// Faddeev-LeVerrier, roots by Aberth-Ehrlich iteration. Adequate for the
/// small (<= ~8x8) closed-loop matrices handled here. Throws on iteration
/// failure rather than returning a silent value.
std::vector<std::complex<double>> eigenvalues_general(const Mat& a);

}  // namespace hdpid
