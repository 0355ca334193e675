#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fplab::linalg {

using Vec = std::vector<double>;

// Dense real matrix, row-major storage. Sized for the desk-scale experiments
// in this project (dimensions up to a few hundred); no attempt at sparsity
// or blocking.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols);  // zero-filled
  Mat(int rows, int cols, Vec entries);

  static Mat identity(int d);
  static Mat diagonal(const Vec& d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(int i, int j) { return entries_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return entries_[static_cast<std::size_t>(i) * cols_ + j]; }

  std::span<const double> data() const { return entries_; }
  std::span<double> data() { return entries_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  Vec entries_;
};

Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(const Mat& a, const Mat& b);
Mat operator*(double c, const Mat& a);
Mat transpose(const Mat& a);
Vec matvec(const Mat& a, const Vec& x);

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm_sq(std::span<const double> a);
double l2_norm(std::span<const double> a);
double linf_norm(std::span<const double> a);

// Throws std::domain_error naming `what` if any entry is non-finite.
void check_finite(std::span<const double> a, const char* what);
void check_finite(const Mat& a, const char* what);

// Row-major flattening of a square matrix and its inverse. transpose_flatten
// maps flatten(M) to flatten(M^T) without forming the matrix.
Vec flatten(const Mat& m);
Mat unflatten(const Vec& v);
Vec transpose_flatten(const Vec& v);

Mat kronecker(const Mat& a, const Mat& b);

double frobenius_norm(const Mat& a);
double spectral_norm(const Mat& a);

bool is_symmetric(const Mat& a, double tol = 1e-12);

// Eigendecomposition of a symmetric matrix: a = vectors * diag(values) * vectors^T,
// eigenvalues ascending. Throws if the asymmetry exceeds asym_tol.
struct SymEig {
  Vec values;
  Mat vectors;
};
SymEig eig_sym(const Mat& a, double asym_tol = 1e-12);

// (lambda_min, lambda_max) of a symmetric matrix.
std::pair<double, double> eig_range_symmetric(const Mat& a, double asym_tol = 1e-12);

// [min_i (a_ii - r_i), max_i (a_ii + r_i)] with r_i the off-diagonal absolute
// row sum. Contains every real eigenvalue of a symmetric matrix.
std::pair<double, double> gershgorin_interval(const Mat& a);

// Symmetric positive definite functions via eigendecomposition. Eigenvalues
// below the floor are rejected, not regularized.
inline constexpr double kPositiveDefiniteFloor = 1e-12;
Mat sym_inverse(const Mat& a);
Mat sym_sqrt(const Mat& a);
Mat sym_inverse_sqrt(const Mat& a);

// || sigma^{-1/2} m sigma^{-1/2} ||_F. sigma must be symmetric positive
// definite; the error message identifies the offending eigenvalue.
double mahalanobis_mat(const Mat& m, const Mat& sigma);

}  // namespace fplab::linalg

namespace fplab {
using linalg::Mat;
using linalg::Vec;
}  // namespace fplab
