#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

namespace hbaca {

using Index = Eigen::Index;
using Real = double;
using Complex = std::complex<double>;

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};
template <typename T>
inline constexpr bool is_complex_v = is_complex<T>::value;

/// Scalars the library is instantiated for.
template <typename T>
concept Scalar = std::is_same_v<T, Real> || std::is_same_v<T, Complex>;

template <Scalar T>
using DenseMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <Scalar T>
using DenseVector = Eigen::Matrix<T, Eigen::Dynamic, 1>;
using RealVector = Eigen::VectorXd;
template <Scalar T>
using ConstMatrixRef = Eigen::Ref<const DenseMatrix<T>>;

using IndexList = std::vector<Index>;

/// Thrown when an input violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <Scalar T>
bool all_finite(const DenseMatrix<T>& a) {
  return a.allFinite();
}

template <Scalar T>
void require_finite(const DenseMatrix<T>& a, const char* what) {
  if (!a.allFinite())
    throw InvalidArgument(std::string(what) + ": matrix has non-finite entries");
}

}  // namespace hbaca
