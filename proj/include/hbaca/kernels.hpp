#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>

#include "hbaca/matrix.hpp"

namespace hbaca {

/// Points stored column-wise: coords(:, i) is point i.
struct PointCloud {
  Eigen::MatrixXd coords;

  Index dim() const { return coords.rows(); }
  Index count() const { return coords.cols(); }
  auto point(Index i) const { return coords.col(i); }
};

struct Gaussian {
  double h;  // width
};
struct Polynomial {
  double h;  // regularization
};
struct Hankel2D {
  double wavenumber;
};
struct ProductOfRandom {
  Index inner_rank;
  std::uint64_t seed;
};
struct DenseFile {
  std::filesystem::path path;
};

/// Kernels evaluated on pairs of points.
using PointKernel = std::variant<Gaussian, Polynomial, Hankel2D>;
using KernelSpec = std::variant<Gaussian, Polynomial, Hankel2D, ProductOfRandom, DenseFile>;

enum class ScalarKind { real, complex };

ScalarKind scalar_kind(const KernelSpec& spec);
void validate(const KernelSpec& spec);

/// Raised by Hankel2D on coincident points (r = 0, where Y0 is singular).
class GeometryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised for malformed point or matrix files; the message names path and line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double bessel_j0(double x);
double bessel_y0(double x);
/// Second-kind Hankel function of order zero, J0(x) - i Y0(x).
Complex hankel2_0(double x);

/// Kernel value between points i and j of one cloud (or x, y directly).
/// Real kernels return a value with zero imaginary part.
Complex kernel_entry(const PointKernel& kernel, const PointCloud& cloud, Index i, Index j);
Complex kernel_value(const PointKernel& kernel, const Eigen::Ref<const Eigen::VectorXd>& x,
                     const Eigen::Ref<const Eigen::VectorXd>& y);

// ---- point clouds ----

/// i.i.d. uniform [0,1) coordinates.
PointCloud random_cloud(Index count, Index dim, std::uint64_t seed);

/// Two random clusters of n points each; the second is shifted by `separation`
/// along the first axis. Points [0, n) are cluster one, [n, 2n) cluster two.
PointCloud two_clusters(Index n, Index dim, double separation, std::uint64_t seed);

/// Two parallel unit-length strips at distance 1 in the plane, sampled at
/// midpoints with round(points_per_wavelength * wavenumber / 2pi) points each.
/// Points [0, N) lie on y = 0, [N, 2N) on y = 1.
PointCloud strip_cloud(double points_per_wavelength, double wavenumber);
Index strip_points_per_side(double points_per_wavelength, double wavenumber);

/// Plain text, one point per line, whitespace or comma separated decimals;
/// blank lines and lines starting with '#' are skipped.
PointCloud read_point_file(const std::filesystem::path& path);

/// Same format as read_point_file, one matrix row per line.
DenseMatrix<Real> read_dense_matrix(const std::filesystem::path& path);
void write_dense_matrix(const std::filesystem::path& path, const DenseMatrix<Real>& a);

// ---- entry oracles ----

/// Implicit matrix whose entries are computed on demand. Implementations are
/// immutable after construction and safe to evaluate from many threads.
template <Scalar T>
class EntryOracle {
 public:
  virtual ~EntryOracle() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;
  virtual T element(Index i, Index j) const = 0;

  /// out(a, b) = element(rows[a], cols[b]); out is resized.
  virtual void fill(std::span<const Index> rows, std::span<const Index> cols,
                    DenseMatrix<T>& out) const;
};

template <Scalar T>
using OraclePtr = std::shared_ptr<const EntryOracle<T>>;

/// Backed by an explicit matrix.
template <Scalar T>
class DenseOracle final : public EntryOracle<T> {
 public:
  explicit DenseOracle(DenseMatrix<T> a);
  Index rows() const override { return a_.rows(); }
  Index cols() const override { return a_.cols(); }
  T element(Index i, Index j) const override { return a_(i, j); }
  void fill(std::span<const Index> rows, std::span<const Index> cols,
            DenseMatrix<T>& out) const override;
  const DenseMatrix<T>& matrix() const { return a_; }

 private:
  DenseMatrix<T> a_;
};

/// A(i, j) = U(i, :) V(:, j) with Gaussian random U (n x r), V (r x n).
class ProductOfRandomOracle final : public EntryOracle<Real> {
 public:
  ProductOfRandomOracle(Index n, Index inner_rank, std::uint64_t seed);
  Index rows() const override { return u_.rows(); }
  Index cols() const override { return v_.cols(); }
  Real element(Index i, Index j) const override { return u_.row(i).dot(v_.col(j)); }
  void fill(std::span<const Index> rows, std::span<const Index> cols,
            DenseMatrix<Real>& out) const override;
  const DenseMatrix<Real>& u() const { return u_; }
  const DenseMatrix<Real>& v() const { return v_; }

 private:
  DenseMatrix<Real> u_, v_;
};

/// A(i, j) = kernel(row_points[i], col_points[j]).
template <Scalar T>
class PointKernelOracle final : public EntryOracle<T> {
 public:
  PointKernelOracle(PointKernel kernel, PointCloud row_points, PointCloud col_points);
  Index rows() const override { return rows_.count(); }
  Index cols() const override { return cols_.count(); }
  T element(Index i, Index j) const override;
  void fill(std::span<const Index> rows, std::span<const Index> cols,
            DenseMatrix<T>& out) const override;

 private:
  PointKernel kernel_;
  PointCloud rows_, cols_;
};

/// Contiguous sub-block [row0, row0 + m) x [col0, col0 + n) of another oracle.
template <Scalar T>
class BlockOracle final : public EntryOracle<T> {
 public:
  BlockOracle(OraclePtr<T> parent, Index row0, Index m, Index col0, Index n);
  Index rows() const override { return m_; }
  Index cols() const override { return n_; }
  T element(Index i, Index j) const override { return parent_->element(row0_ + i, col0_ + j); }
  void fill(std::span<const Index> rows, std::span<const Index> cols,
            DenseMatrix<T>& out) const override;

 private:
  OraclePtr<T> parent_;
  Index row0_, m_, col0_, n_;
};

std::shared_ptr<const ProductOfRandomOracle> product_of_random_oracle(Index n, Index inner_rank,
                                                                       std::uint64_t seed);

/// n x n oracle over a cloud of 2n points: rows from points [0, n), columns from [n, 2n).
template <Scalar T>
OraclePtr<T> offdiag_oracle(const PointKernel& kernel, const PointCloud& cloud);

template <Scalar T>
OraclePtr<T> dense_oracle(DenseMatrix<T> a) {
  return std::make_shared<DenseOracle<T>>(std::move(a));
}

/// Evaluates every entry (serially; see dense_ops.hpp for the parallel path).
template <Scalar T>
DenseMatrix<T> densify_serial(const EntryOracle<T>& oracle);

}  // namespace hbaca
