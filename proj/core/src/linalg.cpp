#include "fplab/linalg.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fplab::linalg {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EMat> view(const Mat& a) {
  return Eigen::Map<const EMat>(a.data().data(), a.rows(), a.cols());
}

Mat from_eigen(const EMat& e) {
  Mat out(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
  Eigen::Map<EMat>(out.data().data(), e.rows(), e.cols()) = e;
  return out;
}

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void require_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << op << ": shape mismatch (" << a.rows() << "x" << a.cols() << " vs " << b.rows()
       << "x" << b.cols() << ")";
    fail(os.str());
  }
}

}  // namespace

Mat::Mat(int rows, int cols) : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(rows) * cols, 0.0) {
  if (rows <= 0 || cols <= 0) fail("Mat: dimensions must be positive");
}

Mat::Mat(int rows, int cols, Vec entries) : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows <= 0 || cols <= 0) fail("Mat: dimensions must be positive");
  if (entries_.size() != static_cast<std::size_t>(rows) * cols) {
    fail("Mat: entry count does not match rows*cols");
  }
}

Mat Mat::identity(int d) {
  Mat out(d, d);
  for (int i = 0; i < d; ++i) out(i, i) = 1.0;
  return out;
}

Mat Mat::diagonal(const Vec& d) {
  Mat out(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) out(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return out;
}

Mat operator+(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "operator+");
  Mat out = a;
  auto o = out.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += bd[i];
  return out;
}

Mat operator-(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "operator-");
  Mat out = a;
  auto o = out.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= bd[i];
  return out;
}

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) fail("operator*: inner dimensions differ");
  return from_eigen(view(a) * view(b));
}

Mat operator*(double c, const Mat& a) {
  Mat out = a;
  for (auto& x : out.data()) x *= c;
  return out;
}

Mat transpose(const Mat& a) {
  Mat out(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Vec matvec(const Mat& a, const Vec& x) {
  if (a.cols() != static_cast<int>(x.size())) fail("matvec: dimension mismatch");
  Vec out(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (int j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    out[i] = acc;
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail("dot: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double l2_norm_sq(std::span<const double> a) { return dot(a, a); }
double l2_norm(std::span<const double> a) { return std::sqrt(l2_norm_sq(a)); }

double linf_norm(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

void check_finite(std::span<const double> a, const char* what) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i])) {
      std::ostringstream os;
      os << what << ": non-finite entry at index " << i;
      throw std::domain_error(os.str());
    }
  }
}

void check_finite(const Mat& a, const char* what) { check_finite(a.data(), what); }

Vec flatten(const Mat& m) {
  if (!m.square()) {
    std::ostringstream os;
    os << "flatten: input must be square (got " << m.rows() << "x" << m.cols() << ")";
    fail(os.str());
  }
  return Vec(m.data().begin(), m.data().end());
}

Mat unflatten(const Vec& v) {
  const auto d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (v.empty() || static_cast<std::size_t>(d) * d != v.size()) {
    std::ostringstream os;
    os << "unflatten: length " << v.size() << " is not a perfect square";
    fail(os.str());
  }
  return Mat(d, d, v);
}

Vec transpose_flatten(const Vec& v) {
  const auto d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (v.empty() || static_cast<std::size_t>(d) * d != v.size()) {
    std::ostringstream os;
    os << "transpose_flatten: length " << v.size() << " is not a perfect square";
    fail(os.str());
  }
  Vec out(v.size());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out[static_cast<std::size_t>(j) * d + i] = v[static_cast<std::size_t>(i) * d + j];
  return out;
}

Mat kronecker(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      if (aij == 0.0) continue;
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

double frobenius_norm(const Mat& a) { return l2_norm(a.data()); }

double spectral_norm(const Mat& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(view(a));
  return svd.singularValues()(0);
}

bool is_symmetric(const Mat& a, double tol) {
  if (!a.square()) return false;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

SymEig eig_sym(const Mat& a, double asym_tol) {
  if (!a.square()) fail("eig_sym: input must be square");
  if (!is_symmetric(a, asym_tol)) {
    std::ostringstream os;
    os << "eig_sym: asymmetry exceeds tolerance " << asym_tol;
    throw std::invalid_argument(os.str());
  }
  // Symmetrize before the solve so the result is exact for the symmetric part.
  Eigen::MatrixXd s = view(a);
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eig_sym: eigensolver failed");

  SymEig out;
  out.values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + a.rows());
  out.vectors = Mat(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.vectors(i, j) = solver.eigenvectors()(i, j);
  return out;
}

std::pair<double, double> eig_range_symmetric(const Mat& a, double asym_tol) {
  const SymEig e = eig_sym(a, asym_tol);
  return {e.values.front(), e.values.back()};
}

std::pair<double, double> gershgorin_interval(const Mat& a) {
  if (!a.square()) fail("gershgorin_interval: input must be square");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < a.rows(); ++i) {
    double radius = 0.0;
    for (int j = 0; j < a.cols(); ++j)
      if (j != i) radius += std::abs(a(i, j));
    lo = std::min(lo, a(i, i) - radius);
    hi = std::max(hi, a(i, i) + radius);
  }
  return {lo, hi};
}

namespace {

// f applied to the eigenvalues; throws when a value is below the PD floor.
template <typename F>
Mat sym_eigen_map(const Mat& a, const char* op, F&& f) {
  const SymEig e = eig_sym(a, 1e-10);
  for (std::size_t i = 0; i < e.values.size(); ++i) {
    if (e.values[i] < kPositiveDefiniteFloor) {
      std::ostringstream os;
      os << op << ": eigenvalue " << e.values[i] << " (index " << i
         << ") below positive-definite floor " << kPositiveDefiniteFloor;
      throw std::domain_error(os.str());
    }
  }
  const int d = a.rows();
  Mat out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += e.vectors(i, k) * f(e.values[k]) * e.vectors(j, k);
      out(i, j) = acc;
      out(j, i) = acc;
    }
  return out;
}

}  // namespace

Mat sym_inverse(const Mat& a) {
  return sym_eigen_map(a, "sym_inverse", [](double l) { return 1.0 / l; });
}

Mat sym_sqrt(const Mat& a) {
  return sym_eigen_map(a, "sym_sqrt", [](double l) { return std::sqrt(l); });
}

Mat sym_inverse_sqrt(const Mat& a) {
  return sym_eigen_map(a, "sym_inverse_sqrt", [](double l) { return 1.0 / std::sqrt(l); });
}

double mahalanobis_mat(const Mat& m, const Mat& sigma) {
  if (!m.square() || m.rows() != sigma.rows()) fail("mahalanobis_mat: dimension mismatch");
  const Mat w = sym_inverse_sqrt(sigma);
  return frobenius_norm(w * m * w);
}

}  // namespace fplab::linalg
