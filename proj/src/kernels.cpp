#include "hbaca/kernels.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <system_error>

#include "hbaca/random.hpp"

namespace hbaca {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

ScalarKind scalar_kind(const KernelSpec& spec) {
  return std::holds_alternative<Hankel2D>(spec) ? ScalarKind::complex : ScalarKind::real;
}

void validate(const KernelSpec& spec) {
  std::visit(overloaded{
                 [](const Gaussian& g) {
                   if (!(g.h > 0.0) || !std::isfinite(g.h))
                     throw InvalidArgument("gaussian kernel: width h must be positive");
                 },
                 [](const Polynomial& p) {
                   if (!std::isfinite(p.h))
                     throw InvalidArgument("polynomial kernel: h must be finite");
                 },
                 [](const Hankel2D& k) {
                   if (!(k.wavenumber > 0.0) || !std::isfinite(k.wavenumber))
                     throw InvalidArgument("hankel2d kernel: wavenumber must be positive");
                 },
                 [](const ProductOfRandom& p) {
                   if (p.inner_rank < 1)
                     throw InvalidArgument("product-of-random: inner rank must be >= 1");
                 },
                 [](const DenseFile&) {},
             },
             spec);
}

double bessel_j0(double x) { return std::cyl_bessel_j(0.0, std::abs(x)); }

double bessel_y0(double x) {
  if (!(x > 0.0)) throw GeometryError("bessel_y0: argument must be positive");
  return std::cyl_neumann(0.0, x);
}

Complex hankel2_0(double x) { return {bessel_j0(x), -bessel_y0(x)}; }

Complex kernel_value(const PointKernel& kernel, const Eigen::Ref<const Eigen::VectorXd>& x,
                     const Eigen::Ref<const Eigen::VectorXd>& y) {
  return std::visit(overloaded{
                        [&](const Gaussian& g) -> Complex {
                          return std::exp(-(x - y).squaredNorm() / (2.0 * g.h * g.h));
                        },
                        [&](const Polynomial& p) -> Complex {
                          const double s = x.dot(y) + p.h;
                          return s * s;
                        },
                        [&](const Hankel2D& k) -> Complex {
                          const double r = (x - y).norm();
                          if (r == 0.0)
                            throw GeometryError("hankel2d kernel: coincident points");
                          return hankel2_0(k.wavenumber * r);
                        },
                    },
                    kernel);
}

Complex kernel_entry(const PointKernel& kernel, const PointCloud& cloud, Index i, Index j) {
  if (i < 0 || j < 0 || i >= cloud.count() || j >= cloud.count())
    throw InvalidArgument("kernel_entry: point index out of range");
  return kernel_value(kernel, cloud.point(i), cloud.point(j));
}

PointCloud random_cloud(Index count, Index dim, std::uint64_t seed) {
  if (count <= 0 || dim <= 0) throw InvalidArgument("random_cloud: count and dim must be positive");
  CounterRng rng(seed);
  PointCloud cloud{Eigen::MatrixXd(dim, count)};
  for (Index i = 0; i < count; ++i)
    for (Index d = 0; d < dim; ++d) cloud.coords(d, i) = rng.uniform();
  return cloud;
}

PointCloud two_clusters(Index n, Index dim, double separation, std::uint64_t seed) {
  PointCloud cloud = random_cloud(2 * n, dim, seed);
  cloud.coords.row(0).tail(n).array() += separation;
  return cloud;
}

Index strip_points_per_side(double points_per_wavelength, double wavenumber) {
  if (!(points_per_wavelength > 0.0) || !(wavenumber > 0.0))
    throw InvalidArgument("strip_cloud: density and wavenumber must be positive");
  const double wavelengths = wavenumber / (2.0 * std::numbers::pi);
  const auto n = static_cast<Index>(std::llround(points_per_wavelength * wavelengths));
  if (n < 1) throw InvalidArgument("strip_cloud: fewer than one point per strip");
  return n;
}

PointCloud strip_cloud(double points_per_wavelength, double wavenumber) {
  const Index n = strip_points_per_side(points_per_wavelength, wavenumber);
  PointCloud cloud{Eigen::MatrixXd(2, 2 * n)};
  for (Index i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    cloud.coords.col(i) << t, 0.0;
    cloud.coords.col(n + i) << t, 1.0;
  }
  return cloud;
}

namespace {

std::vector<std::vector<double>> read_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::vector<double> values;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t' || *p == ',' || *p == '\r')) ++p;
      if (p == end) break;
      double v = 0.0;
      const char* start = p;
      if (*start == '+') ++start;
      auto [next, ec] = std::from_chars(start, end, v);
      if (ec != std::errc() || (next < end && *next != ' ' && *next != '\t' && *next != ',' &&
                                *next != '\r'))
        throw ParseError(path.string() + ":" + std::to_string(lineno) + ": non-numeric value");
      if (!std::isfinite(v))
        throw ParseError(path.string() + ":" + std::to_string(lineno) + ": non-finite value");
      values.push_back(v);
      p = next;
    }
    if (!rows.empty() && values.size() != rows.front().size())
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(rows.front().size()) + " values, found " +
                       std::to_string(values.size()));
    rows.push_back(std::move(values));
  }
  if (rows.empty() || rows.front().empty()) throw ParseError(path.string() + ": no data rows");
  return rows;
}

}  // namespace

PointCloud read_point_file(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  PointCloud cloud{Eigen::MatrixXd(static_cast<Index>(rows.front().size()),
                                   static_cast<Index>(rows.size()))};
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t d = 0; d < rows[i].size(); ++d)
      cloud.coords(static_cast<Index>(d), static_cast<Index>(i)) = rows[i][d];
  return cloud;
}

DenseMatrix<Real> read_dense_matrix(const std::filesystem::path& path) {
  return read_point_file(path).coords.transpose();
}

void write_dense_matrix(const std::filesystem::path& path, const DenseMatrix<Real>& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  char buf[64];
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, a(i, j));
      if (j > 0) out << ' ';
      out.write(buf, end - buf);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

// ---- oracles ----

template <Scalar T>
void EntryOracle<T>::fill(std::span<const Index> rows, std::span<const Index> cols,
                          DenseMatrix<T>& out) const {
  out.resize(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (Index b = 0; b < out.cols(); ++b)
    for (Index a = 0; a < out.rows(); ++a) out(a, b) = element(rows[a], cols[b]);
}

template <Scalar T>
DenseOracle<T>::DenseOracle(DenseMatrix<T> a) : a_(std::move(a)) {
  require_finite(a_, "dense oracle");
}

template <Scalar T>
void DenseOracle<T>::fill(std::span<const Index> rows, std::span<const Index> cols,
                          DenseMatrix<T>& out) const {
  out.resize(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (Index b = 0; b < out.cols(); ++b)
    for (Index a = 0; a < out.rows(); ++a) out(a, b) = a_(rows[a], cols[b]);
}

ProductOfRandomOracle::ProductOfRandomOracle(Index n, Index inner_rank, std::uint64_t seed) {
  if (n < 1 || inner_rank < 1 || inner_rank > n)
    throw InvalidArgument("product-of-random: need 1 <= inner rank <= n");
  CounterRng rng(seed);
  u_.resize(n, inner_rank);
  v_.resize(inner_rank, n);
  for (Index j = 0; j < inner_rank; ++j)
    for (Index i = 0; i < n; ++i) u_(i, j) = rng.normal();
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < inner_rank; ++i) v_(i, j) = rng.normal();
}

void ProductOfRandomOracle::fill(std::span<const Index> rows, std::span<const Index> cols,
                                 DenseMatrix<Real>& out) const {
  DenseMatrix<Real> ur(static_cast<Index>(rows.size()), u_.cols());
  for (Index a = 0; a < ur.rows(); ++a) ur.row(a) = u_.row(rows[a]);
  DenseMatrix<Real> vc(v_.rows(), static_cast<Index>(cols.size()));
  for (Index b = 0; b < vc.cols(); ++b) vc.col(b) = v_.col(cols[b]);
  out.noalias() = ur * vc;
}

std::shared_ptr<const ProductOfRandomOracle> product_of_random_oracle(Index n, Index inner_rank,
                                                                       std::uint64_t seed) {
  return std::make_shared<ProductOfRandomOracle>(n, inner_rank, seed);
}

template <Scalar T>
PointKernelOracle<T>::PointKernelOracle(PointKernel kernel, PointCloud row_points,
                                        PointCloud col_points)
    : kernel_(std::move(kernel)), rows_(std::move(row_points)), cols_(std::move(col_points)) {
  std::visit([](const auto& k) { validate(KernelSpec(k)); }, kernel_);
  if (rows_.dim() != cols_.dim()) throw InvalidArgument("kernel oracle: point dimensions differ");
  if (!rows_.coords.allFinite() || !cols_.coords.allFinite())
    throw InvalidArgument("kernel oracle: non-finite coordinates");
  const bool complex_kernel = std::holds_alternative<Hankel2D>(kernel_);
  if (complex_kernel != is_complex_v<T>)
    throw InvalidArgument("kernel oracle: scalar type does not match kernel");
}

template <Scalar T>
T PointKernelOracle<T>::element(Index i, Index j) const {
  const Complex v = kernel_value(kernel_, rows_.point(i), cols_.point(j));
  if constexpr (is_complex_v<T>)
    return v;
  else
    return v.real();
}

template <Scalar T>
void PointKernelOracle<T>::fill(std::span<const Index> rows, std::span<const Index> cols,
                                DenseMatrix<T>& out) const {
  out.resize(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  const Index dim = rows_.dim();
  std::visit(
      overloaded{
          [&](const Gaussian& g) {
            const double scale = -1.0 / (2.0 * g.h * g.h);
            for (Index b = 0; b < out.cols(); ++b) {
              const double* y = cols_.coords.col(cols[b]).data();
              for (Index a = 0; a < out.rows(); ++a) {
                const double* x = rows_.coords.col(rows[a]).data();
                double s = 0.0;
                for (Index d = 0; d < dim; ++d) s += (x[d] - y[d]) * (x[d] - y[d]);
                out(a, b) = T(std::exp(s * scale));
              }
            }
          },
          [&](const auto&) {
            for (Index b = 0; b < out.cols(); ++b)
              for (Index a = 0; a < out.rows(); ++a) out(a, b) = element(rows[a], cols[b]);
          },
      },
      kernel_);
}

template <Scalar T>
BlockOracle<T>::BlockOracle(OraclePtr<T> parent, Index row0, Index m, Index col0, Index n)
    : parent_(std::move(parent)), row0_(row0), m_(m), col0_(col0), n_(n) {
  if (row0 < 0 || col0 < 0 || m < 0 || n < 0 || row0 + m > parent_->rows() ||
      col0 + n > parent_->cols())
    throw InvalidArgument("block oracle: range outside parent");
}

template <Scalar T>
void BlockOracle<T>::fill(std::span<const Index> rows, std::span<const Index> cols,
                          DenseMatrix<T>& out) const {
  IndexList r(rows.begin(), rows.end()), c(cols.begin(), cols.end());
  for (auto& i : r) i += row0_;
  for (auto& j : c) j += col0_;
  parent_->fill(r, c, out);
}

template <Scalar T>
OraclePtr<T> offdiag_oracle(const PointKernel& kernel, const PointCloud& cloud) {
  if (cloud.count() < 2 || cloud.count() % 2 != 0)
    throw InvalidArgument("offdiag_oracle: cloud must hold an even, nonzero number of points");
  const Index n = cloud.count() / 2;
  PointCloud first{cloud.coords.leftCols(n)};
  PointCloud second{cloud.coords.rightCols(n)};
  return std::make_shared<PointKernelOracle<T>>(kernel, std::move(first), std::move(second));
}

template <Scalar T>
DenseMatrix<T> densify_serial(const EntryOracle<T>& oracle) {
  IndexList rows(static_cast<std::size_t>(oracle.rows())), cols(static_cast<std::size_t>(oracle.cols()));
  std::iota(rows.begin(), rows.end(), Index{0});
  std::iota(cols.begin(), cols.end(), Index{0});
  DenseMatrix<T> a;
  oracle.fill(rows, cols, a);
  return a;
}

template class EntryOracle<Real>;
template class EntryOracle<Complex>;
template class DenseOracle<Real>;
template class DenseOracle<Complex>;
template class PointKernelOracle<Real>;
template class PointKernelOracle<Complex>;
template class BlockOracle<Real>;
template class BlockOracle<Complex>;
template OraclePtr<Real> offdiag_oracle<Real>(const PointKernel&, const PointCloud&);
template OraclePtr<Complex> offdiag_oracle<Complex>(const PointKernel&, const PointCloud&);
template DenseMatrix<Real> densify_serial<Real>(const EntryOracle<Real>&);
template DenseMatrix<Complex> densify_serial<Complex>(const EntryOracle<Complex>&);

}  // namespace hbaca
