#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gkp {

using cplx = std::complex<double>;
using cplxl = std::complex<long double>;

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using CMatL = Eigen::Matrix<cplxl, Eigen::Dynamic, Eigen::Dynamic>;
using CVecL = Eigen::Matrix<cplxl, Eigen::Dynamic, 1>;
using IVec = Eigen::Matrix<long long, Eigen::Dynamic, 1>;
using IMat = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kPi = 3.14159265358979323846;

enum class Errc {
  dimension,
  invalid_lattice,
  domain,
  singular,
  unsupported,
  divergent,
  decay_violation,
  degenerate,
  tiling,
  tail_bound,
  convergence,
  config,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Omega = [[0, I], [-I, 0]] for n modes.
inline Mat omega(int n) {
  Mat o = Mat::Zero(2 * n, 2 * n);
  o.topRightCorner(n, n).setIdentity();
  o.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return o;
}

inline double delta_from_db(double db) { return std::sqrt(std::pow(10.0, -db / 10.0)); }
inline double db_from_delta(double delta) { return -10.0 * std::log10(delta * delta); }

}  // namespace gkp
