#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mpuphase {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using IMat = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kPi = 3.14159265358979323846;

// Residual thresholds shared across modules; names say what the number gates.
namespace tol {
inline constexpr double kDefault = 1e-9;        // generic pass/fail residual
inline constexpr double kTight = 1e-10;         // canonical form, VW = 1, isometries
inline constexpr double kExactish = 1e-12;      // compositions that cancel algebraically
inline constexpr double kParallel = 1e-8;       // least-squares parallelism certificates
inline constexpr double kClassRational = 1e-7;  // integrality test in class decisions
// Residuals recovered as sqrt of differences of bond-space traces carry a
// sqrt(machine-eps) floor; gates on them must sit above that floor.
inline constexpr double kCertificate = 1e-6;
inline constexpr double kDegenerate = 1e-8;     // leading-eigenvalue degeneracy signal
inline constexpr double kGapMax = 0.99;         // spectral-gap uniqueness requirement
inline constexpr double kPowerIter = 1e-12;     // matrix-free eigensolver tolerance
inline constexpr int kPowerIterMax = 100000;
inline constexpr int kDenseEigenMaxDim = 4096;  // materialize transfer maps up to this
inline constexpr int kLengthCap = 8;            // injectivity / nilpotency search cap
}  // namespace tol

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Input fails a documented precondition (bad table, non-canonical tensor, ...).
struct ValidationError : Error {
  using Error::Error;
};
// Leading eigenvalue degenerate: non-injectivity signal, not a crash.
struct SpectrumError : Error {
  using Error::Error;
};
struct ResourceError : Error {
  using Error::Error;
};
// A bounded search (injectivity length, nilpotency length) hit its cap.
struct CapError : Error {
  using Error::Error;
};
struct SchemaError : Error {
  using Error::Error;
};

// Deterministic random stream. Draws go through explicit bit-to-double
// conversion so fixtures are reproducible independent of the standard
// library's distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }
  Complex gaussian_complex() { return {gaussian(), gaussian()}; }
  Complex unit_complex() { return std::polar(1.0, 2.0 * kPi * uniform()); }
  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Norm policy for reported residuals: operator max-column-sum on small
// materialized matrices, Frobenius beyond that.
inline double residual_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() <= 256 && m.cols() <= 256)
    return m.cwiseAbs().colwise().sum().maxCoeff();
  return m.norm();
}

inline Mat identity(int n) { return Mat::Identity(n, n); }

// Kronecker product, a ⊗ b (a's index slow).
inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Phase branch: arg(z) / 2π reduced to [0, 1).
inline double log_phase(Complex z) {
  double t = std::arg(z) / (2.0 * kPi);
  t -= std::floor(t);
  if (t >= 1.0) t = 0.0;
  return t;
}

inline Complex from_log_phase(double t) { return std::polar(1.0, 2.0 * kPi * t); }

inline int ipow(int b, int e) {
  int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace mpuphase
