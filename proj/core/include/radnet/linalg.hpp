#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "radnet/errors.hpp"

namespace radnet {

using cplx = std::complex<double>;

// ============================================================
// Small dense real/complex containers. Everything here is sized
// for code lengths M <= 16 (lifted order 2M <= 32) and 4x4 state
// blocks; clarity and certified accuracy over asymptotic speed.
// ============================================================

class Vector {
 public:
  Vector() = default;
  explicit Vector(int n) : data_(static_cast<size_t>(n), 0.0) {}
  Vector(std::initializer_list<double> init) : data_(init) {}

  int size() const { return static_cast<int>(data_.size()); }
  double& operator[](int i) { return data_[static_cast<size_t>(i)]; }
  double operator[](int i) const { return data_[static_cast<size_t>(i)]; }
  double& at(int i) { return data_.at(static_cast<size_t>(i)); }
  double at(int i) const { return data_.at(static_cast<size_t>(i)); }

  double dot(const Vector& other) const;
  double norm() const;
  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double s);

  const std::vector<double>& raw() const { return data_; }

 private:
  std::vector<double> data_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double s, Vector a);

class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {}

  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }
  double& at(int i, int j);
  double at(int i, int j) const;

  Vector matvec(const Vector& x) const;
  Vector transpose_matvec(const Vector& x) const;
  Matrix transpose() const;
  Matrix operator*(const Matrix& other) const;
  Matrix& operator+=(const Matrix& other);
  Matrix& operator*=(double s);

  double max_abs() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Real symmetric matrix; the lower triangle is stored once, so
/// entry(i,j) == entry(j,i) holds exactly by construction.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(int order)
      : order_(order), data_(static_cast<size_t>(order) * (order + 1) / 2, 0.0) {}

  static SymmetricMatrix identity(int n);
  static SymmetricMatrix diagonal(const Vector& d);
  /// The symmetric part of a dense square matrix, (a + a^T)/2.
  static SymmetricMatrix from_dense_symmetrized(const Matrix& a);

  int order() const { return order_; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }
  double at(int i, int j) const;
  void set(int i, int j, double v) { data_[index(i, j)] = v; }
  void add(int i, int j, double v) { data_[index(i, j)] += v; }

  double quad_form(const Vector& x) const;  // x^T M x
  Vector matvec(const Vector& x) const;
  Matrix to_dense() const;
  double trace() const;
  double max_abs() const;

  SymmetricMatrix& operator+=(const SymmetricMatrix& other);
  SymmetricMatrix& operator*=(double s);
  /// this += s * x x^T
  void add_outer(const Vector& x, double s);
  /// this += s * (x y^T + y x^T)
  void add_symmetric_outer(const Vector& x, const Vector& y, double s);
  void add_scaled_identity(double s);

 private:
  size_t index(int i, int j) const {
    if (i < j) std::swap(i, j);
    return static_cast<size_t>(i) * (i + 1) / 2 + j;
  }
  int order_ = 0;
  std::vector<double> data_;
};

SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b);

class ComplexVector {
 public:
  ComplexVector() = default;
  explicit ComplexVector(int n) : data_(static_cast<size_t>(n), cplx(0.0, 0.0)) {}

  int size() const { return static_cast<int>(data_.size()); }
  cplx& operator[](int i) { return data_[static_cast<size_t>(i)]; }
  const cplx& operator[](int i) const { return data_[static_cast<size_t>(i)]; }
  cplx& at(int i) { return data_.at(static_cast<size_t>(i)); }
  const cplx& at(int i) const { return data_.at(static_cast<size_t>(i)); }

  double norm() const;

 private:
  std::vector<cplx> data_;
};

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, cplx(0.0, 0.0)) {}

  static ComplexMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  cplx& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  const cplx& operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }
  cplx& at(int i, int j);
  const cplx& at(int i, int j) const;

  ComplexVector matvec(const ComplexVector& x) const;
  /// c^H A c. For Hermitian A the imaginary part vanishes up to rounding.
  cplx sesquilinear_form(const ComplexVector& c) const;
  double max_abs() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<cplx> data_;
};

// ============================================================
// Cholesky factorization of SPD matrices
// ============================================================

/// Reusable lower-triangular Cholesky factor of an SPD matrix.
/// Construction throws DefinitenessError naming the failing pivot.
class SpdSolver {
 public:
  explicit SpdSolver(const SymmetricMatrix& m, const std::string& context = "matrix");

  int order() const { return n_; }
  Vector solve(const Vector& rhs) const;
  ComplexVector solve(const ComplexVector& rhs) const;
  /// Tr(M^{-1}) = sum of squared entries of L^{-1}; exact up to rounding.
  double trace_inverse() const;
  /// Dense M^{-1}, built column by column from the factorization.
  SymmetricMatrix inverse() const;

 private:
  int n_ = 0;
  std::vector<double> l_;  // row-major lower triangle, packed
};

/// Factor m once and return (solver handle, Tr(m^{-1})).
std::pair<SpdSolver, double> spd_solve_and_trace_inverse(const SymmetricMatrix& m);

// ============================================================
// Symmetric eigenproblem (cyclic Jacobi)
// ============================================================

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // columns are eigenvectors, same order
};

EigenDecomposition jacobi_eigen(const SymmetricMatrix& m);

/// (lambda_min, lambda_max) of a finite symmetric matrix.
std::pair<double, double> min_max_eigenvalues(const SymmetricMatrix& m);

}  // namespace radnet
