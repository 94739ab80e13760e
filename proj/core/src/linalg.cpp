#include "radnet/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace radnet {

namespace {

void check_same_size(int a, int b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": size mismatch");
}

}  // namespace

// ---------------- Vector ----------------

double Vector::dot(const Vector& other) const {
  check_same_size(size(), other.size(), "Vector::dot");
  double acc = 0.0;
  for (int i = 0; i < size(); ++i) acc += data_[i] * other.data_[i];
  return acc;
}

double Vector::norm() const { return std::sqrt(dot(*this)); }

Vector& Vector::operator+=(const Vector& other) {
  check_same_size(size(), other.size(), "Vector::operator+=");
  for (int i = 0; i < size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  check_same_size(size(), other.size(), "Vector::operator-=");
  for (int i = 0; i < size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Vector& Vector::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator*(double s, Vector a) { return a *= s; }

// ---------------- Matrix ----------------

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double& Matrix::at(int i, int j) {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw std::out_of_range("Matrix::at");
  return (*this)(i, j);
}

double Matrix::at(int i, int j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw std::out_of_range("Matrix::at");
  return (*this)(i, j);
}

Vector Matrix::matvec(const Vector& x) const {
  check_same_size(cols_, x.size(), "Matrix::matvec");
  Vector y(rows_);
  for (int i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (int j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

Vector Matrix::transpose_matvec(const Vector& x) const {
  check_same_size(rows_, x.size(), "Matrix::transpose_matvec");
  Vector y(cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) y[j] += (*this)(i, j) * x[i];
  return y;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::operator*(const Matrix& other) const {
  check_same_size(cols_, other.rows_, "Matrix::operator*");
  Matrix out(rows_, other.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < other.cols_; ++j) out(i, j) += aik * other(k, j);
    }
  return out;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  check_same_size(rows_ * cols_, other.rows_ * other.cols_, "Matrix::operator+=");
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

// ---------------- SymmetricMatrix ----------------

SymmetricMatrix SymmetricMatrix::identity(int n) {
  SymmetricMatrix m(n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

SymmetricMatrix SymmetricMatrix::diagonal(const Vector& d) {
  SymmetricMatrix m(d.size());
  for (int i = 0; i < d.size(); ++i) m.set(i, i, d[i]);
  return m;
}

SymmetricMatrix SymmetricMatrix::from_dense_symmetrized(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("from_dense_symmetrized: not square");
  SymmetricMatrix m(a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j <= i; ++j) m.set(i, j, 0.5 * (a(i, j) + a(j, i)));
  return m;
}

double SymmetricMatrix::at(int i, int j) const {
  if (i < 0 || i >= order_ || j < 0 || j >= order_) throw std::out_of_range("SymmetricMatrix::at");
  return (*this)(i, j);
}

double SymmetricMatrix::quad_form(const Vector& x) const {
  check_same_size(order_, x.size(), "SymmetricMatrix::quad_form");
  double diag = 0.0, off = 0.0;
  for (int i = 0; i < order_; ++i) {
    diag += (*this)(i, i) * x[i] * x[i];
    for (int j = 0; j < i; ++j) off += (*this)(i, j) * x[i] * x[j];
  }
  return diag + 2.0 * off;
}

Vector SymmetricMatrix::matvec(const Vector& x) const {
  check_same_size(order_, x.size(), "SymmetricMatrix::matvec");
  Vector y(order_);
  for (int i = 0; i < order_; ++i) {
    double acc = 0.0;
    for (int j = 0; j < order_; ++j) acc += (*this)(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

Matrix SymmetricMatrix::to_dense() const {
  Matrix m(order_, order_);
  for (int i = 0; i < order_; ++i)
    for (int j = 0; j < order_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

double SymmetricMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < order_; ++i) t += (*this)(i, i);
  return t;
}

double SymmetricMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

SymmetricMatrix& SymmetricMatrix::operator+=(const SymmetricMatrix& other) {
  check_same_size(order_, other.order_, "SymmetricMatrix::operator+=");
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

SymmetricMatrix& SymmetricMatrix::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

void SymmetricMatrix::add_outer(const Vector& x, double s) {
  check_same_size(order_, x.size(), "SymmetricMatrix::add_outer");
  for (int i = 0; i < order_; ++i)
    for (int j = 0; j <= i; ++j) data_[index(i, j)] += s * x[i] * x[j];
}

void SymmetricMatrix::add_symmetric_outer(const Vector& x, const Vector& y, double s) {
  check_same_size(order_, x.size(), "SymmetricMatrix::add_symmetric_outer");
  check_same_size(order_, y.size(), "SymmetricMatrix::add_symmetric_outer");
  for (int i = 0; i < order_; ++i)
    for (int j = 0; j <= i; ++j) data_[index(i, j)] += s * (x[i] * y[j] + y[i] * x[j]);
}

void SymmetricMatrix::add_scaled_identity(double s) {
  for (int i = 0; i < order_; ++i) data_[index(i, i)] += s;
}

SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b) { return a += b; }

// ---------------- ComplexVector / ComplexMatrix ----------------

double ComplexVector::norm() const {
  double acc = 0.0;
  for (const auto& v : data_) acc += std::norm(v);
  return std::sqrt(acc);
}

ComplexMatrix ComplexMatrix::identity(int n) {
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = cplx(1.0, 0.0);
  return m;
}

cplx& ComplexMatrix::at(int i, int j) {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw std::out_of_range("ComplexMatrix::at");
  return (*this)(i, j);
}

const cplx& ComplexMatrix::at(int i, int j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw std::out_of_range("ComplexMatrix::at");
  return (*this)(i, j);
}

ComplexVector ComplexMatrix::matvec(const ComplexVector& x) const {
  check_same_size(cols_, x.size(), "ComplexMatrix::matvec");
  ComplexVector y(rows_);
  for (int i = 0; i < rows_; ++i) {
    cplx acc(0.0, 0.0);
    for (int j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

cplx ComplexMatrix::sesquilinear_form(const ComplexVector& c) const {
  check_same_size(cols_, c.size(), "ComplexMatrix::sesquilinear_form");
  cplx acc(0.0, 0.0);
  for (int i = 0; i < rows_; ++i) {
    cplx row(0.0, 0.0);
    for (int j = 0; j < cols_; ++j) row += (*this)(i, j) * c[j];
    acc += std::conj(c[i]) * row;
  }
  return acc;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

// ---------------- SpdSolver ----------------

SpdSolver::SpdSolver(const SymmetricMatrix& m, const std::string& context) : n_(m.order()) {
  l_.assign(static_cast<size_t>(n_) * (n_ + 1) / 2, 0.0);
  auto idx = [](int i, int j) { return static_cast<size_t>(i) * (i + 1) / 2 + j; };
  for (int j = 0; j < n_; ++j) {
    double diag = m(j, j);
    for (int k = 0; k < j; ++k) diag -= l_[idx(j, k)] * l_[idx(j, k)];
    if (!(diag > 0.0) || !std::isfinite(diag)) throw DefinitenessError(j, diag, context);
    const double ljj = std::sqrt(diag);
    l_[idx(j, j)] = ljj;
    for (int i = j + 1; i < n_; ++i) {
      double acc = m(i, j);
      for (int k = 0; k < j; ++k) acc -= l_[idx(i, k)] * l_[idx(j, k)];
      l_[idx(i, j)] = acc / ljj;
    }
  }
}

Vector SpdSolver::solve(const Vector& rhs) const {
  check_same_size(n_, rhs.size(), "SpdSolver::solve");
  auto idx = [](int i, int j) { return static_cast<size_t>(i) * (i + 1) / 2 + j; };
  Vector y(n_);
  for (int i = 0; i < n_; ++i) {
    double acc = rhs[i];
    for (int k = 0; k < i; ++k) acc -= l_[idx(i, k)] * y[k];
    y[i] = acc / l_[idx(i, i)];
  }
  Vector x(n_);
  for (int i = n_ - 1; i >= 0; --i) {
    double acc = y[i];
    for (int k = i + 1; k < n_; ++k) acc -= l_[idx(k, i)] * x[k];
    x[i] = acc / l_[idx(i, i)];
  }
  return x;
}

ComplexVector SpdSolver::solve(const ComplexVector& rhs) const {
  Vector re(n_), im(n_);
  for (int i = 0; i < n_; ++i) {
    re[i] = rhs[i].real();
    im[i] = rhs[i].imag();
  }
  const Vector sre = solve(re), sim = solve(im);
  ComplexVector out(n_);
  for (int i = 0; i < n_; ++i) out[i] = cplx(sre[i], sim[i]);
  return out;
}

double SpdSolver::trace_inverse() const {
  // Tr(M^{-1}) = ||L^{-1}||_F^2; compute columns of L^{-1} by forward substitution.
  auto idx = [](int i, int j) { return static_cast<size_t>(i) * (i + 1) / 2 + j; };
  double acc = 0.0;
  std::vector<double> col(static_cast<size_t>(n_));
  for (int j = 0; j < n_; ++j) {
    for (int i = 0; i < j; ++i) col[i] = 0.0;
    col[j] = 1.0 / l_[idx(j, j)];
    acc += col[j] * col[j];
    for (int i = j + 1; i < n_; ++i) {
      double s = 0.0;
      for (int k = j; k < i; ++k) s -= l_[idx(i, k)] * col[k];
      col[i] = s / l_[idx(i, i)];
      acc += col[i] * col[i];
    }
  }
  return acc;
}

SymmetricMatrix SpdSolver::inverse() const {
  SymmetricMatrix inv(n_);
  for (int j = 0; j < n_; ++j) {
    Vector e(n_);
    e[j] = 1.0;
    const Vector col = solve(e);
    for (int i = j; i < n_; ++i) inv.set(i, j, col[i]);
  }
  return inv;
}

std::pair<SpdSolver, double> spd_solve_and_trace_inverse(const SymmetricMatrix& m) {
  SpdSolver solver(m);
  const double trace = solver.trace_inverse();
  return {std::move(solver), trace};
}

// ---------------- Jacobi eigensolver ----------------

EigenDecomposition jacobi_eigen(const SymmetricMatrix& m) {
  const int n = m.order();
  Matrix a = m.to_dense();
  Matrix v = Matrix::identity(n);
  if (n == 1) return {Vector{a(0, 0)}, v};

  double frob = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) frob += a(i, j) * a(i, j);
  frob = std::sqrt(frob);
  const double tol = (frob > 0.0 ? frob : 1.0) * 1e-15;

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= tol) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= tol * 1e-2 / n) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = akp - s * (akq + tau * akp);
          a(p, k) = a(k, p);
          a(k, q) = akq + s * (akp - tau * akq);
          a(q, k) = a(k, q);
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp - s * (vkq + tau * vkp);
          v(k, q) = vkq + s * (vkp - tau * vkq);
        }
      }
    }
  }

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

  EigenDecomposition out;
  out.values = Vector(n);
  out.vectors = Matrix(n, n);
  for (int c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]);
    for (int r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

std::pair<double, double> min_max_eigenvalues(const SymmetricMatrix& m) {
  const auto eig = jacobi_eigen(m);
  return {eig.values[0], eig.values[m.order() - 1]};
}

}  // namespace radnet
