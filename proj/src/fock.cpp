#include "qpg/fock.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "qpg/errors.hpp"

namespace qpg {

namespace {

using std::complex;

constexpr double kTwoOverPi = 0.63661977236758134308;

// Operators are built at a padded dimension so truncation artifacts of the
// matrix exponentials stay above the returned block.
int working_dim(int cutoff) { return cutoff + 32; }

struct ShapeDecomposition {
  double nbar;    // thermal occupation
  double r;       // squeeze parameter, x shrinks by e^{-r}
  double theta;   // phase-space rotation after squeezing
  complex<double> alpha;
};

ShapeDecomposition decompose_gaussian(const GaussianState& state) {
  if (state.modes() != 1) {
    throw std::invalid_argument("gaussian_to_fock expects a single mode");
  }
  if (!state.is_physical(1e-9)) {
    throw NumericalError("gaussian_to_fock: covariance is unphysical");
  }
  const Eigen::Matrix2d v = state.cov;
  const double det = v.determinant();
  const double nu = std::sqrt(std::max(det, 1.0 / 16.0));
  const double scale = 4.0 * nu;  // 2 nbar + 1

  ShapeDecomposition d;
  d.nbar = std::max(0.0, (scale - 1.0) / 2.0);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(v / scale);
  const double lo = es.eigenvalues()(0);
  d.r = -0.5 * std::log(std::max(4.0 * lo, 1e-300));
  const Eigen::Vector2d axis = es.eigenvectors().col(0);
  d.theta = std::atan2(axis(1), axis(0));
  d.alpha = complex<double>(state.mean(0), state.mean(1));
  return d;
}

Eigen::MatrixXcd synthesis_operator(const ShapeDecomposition& d, int dim) {
  return displacement_operator(d.alpha, dim) *
         (rotation_operator(d.theta, dim) * squeeze_operator(d.r, dim));
}

}  // namespace

bool FockDensityMatrix::is_valid(double tol) const {
  const int n = cutoff();
  if (n == 0) return false;
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(rho.trace().real() - 1.0) > std::max(tol, 2e-3)) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  return es.eigenvalues().minCoeff() >= -tol;
}

Eigen::MatrixXcd ladder_lower(int dim) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

Eigen::MatrixXcd number_operator(int dim) {
  Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = double(k);
  return n;
}

Eigen::VectorXd hermite_functions(double x, int count) {
  if (count < 1) throw std::invalid_argument("hermite_functions: count < 1");
  Eigen::VectorXd phi(count);
  phi(0) = 0.89324384173813864002 * std::exp(-x * x);  // (2/pi)^{1/4}
  if (count == 1) return phi;
  phi(1) = 2.0 * x * phi(0);
  for (int n = 1; n + 1 < count; ++n) {
    phi(n + 1) = (2.0 * x * phi(n) - std::sqrt(double(n)) * phi(n - 1)) /
                 std::sqrt(double(n + 1));
  }
  return phi;
}

Eigen::MatrixXcd displacement_operator(std::complex<double> alpha, int dim) {
  const Eigen::MatrixXcd a = ladder_lower(dim);
  const Eigen::MatrixXcd g = alpha * a.adjoint() - std::conj(alpha) * a;
  return g.exp();
}

Eigen::MatrixXcd squeeze_operator(double r, int dim) {
  const Eigen::MatrixXcd a = ladder_lower(dim);
  const Eigen::MatrixXcd aa = a * a;
  const Eigen::MatrixXcd g = 0.5 * r * (aa - aa.adjoint());
  return g.exp();
}

Eigen::MatrixXcd rotation_operator(double phi, int dim) {
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    r(n, n) = std::polar(1.0, phi * double(n));
  }
  return r;
}

FockDensityMatrix gaussian_to_fock(const GaussianState& state, int cutoff) {
  if (cutoff < 1) throw std::invalid_argument("gaussian_to_fock: cutoff < 1");
  const ShapeDecomposition d = decompose_gaussian(state);
  const int wd = working_dim(cutoff);

  Eigen::VectorXd thermal(wd);
  if (d.nbar <= 0.0) {
    thermal.setZero();
    thermal(0) = 1.0;
  } else {
    const double ratio = d.nbar / (d.nbar + 1.0);
    double q = 1.0 / (d.nbar + 1.0);
    for (int n = 0; n < wd; ++n) {
      thermal(n) = q;
      q *= ratio;
    }
  }

  const Eigen::MatrixXcd m = synthesis_operator(d, wd);
  const Eigen::MatrixXcd full = m * thermal.asDiagonal() * m.adjoint();

  FockDensityMatrix out;
  out.rho = full.topLeftCorner(cutoff, cutoff);
  const double tail = 1.0 - out.rho.trace().real();
  if (tail > 1e-3) {
    throw NumericalError("gaussian_to_fock: cutoff " + std::to_string(cutoff) +
                         " misses " + std::to_string(tail) +
                         " of the trace");
  }
  return out;
}

Eigen::VectorXcd gaussian_to_fock_pure(const GaussianState& state,
                                       int cutoff) {
  if (cutoff < 1) {
    throw std::invalid_argument("gaussian_to_fock_pure: cutoff < 1");
  }
  if (state.purity() < 1.0 - 1e-6) {
    throw std::invalid_argument("gaussian_to_fock_pure: state is mixed");
  }
  const ShapeDecomposition d = decompose_gaussian(state);
  const int wd = working_dim(cutoff);
  Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(wd);
  vac(0) = 1.0;
  const Eigen::VectorXcd full = synthesis_operator(d, wd) * vac;
  const Eigen::VectorXcd head = full.head(cutoff);
  const double tail = 1.0 - head.squaredNorm();
  if (tail > 1e-3) {
    throw NumericalError("gaussian_to_fock_pure: cutoff " +
                         std::to_string(cutoff) + " misses " +
                         std::to_string(tail) + " of the norm");
  }
  return head;
}

double wigner_point(const Eigen::MatrixXcd& rho, double x, double p) {
  // W(x, p) = (2/pi) tr(rho D(2 alpha) Pi) with Pi the parity operator.
  // Displacement matrix elements come from associated Laguerre recurrences,
  // one diagonal k = m - n at a time, with the factorial ratio folded in as
  // a running square-root product so nothing overflows.
  const int dim = static_cast<int>(rho.rows());
  const complex<double> beta(2.0 * x, 2.0 * p);
  const double z = std::norm(beta);
  const double gauss = std::exp(-0.5 * z);

  double acc = 0.0;
  complex<double> beta_k(1.0, 0.0);
  for (int k = 0; k < dim; ++k) {
    double s = 1.0;  // sqrt(n! / (n+k)!) at n = 0 is 1/sqrt(k!)
    for (int j = 1; j <= k; ++j) s /= std::sqrt(double(j));
    double lag_prev = 0.0;
    double lag = 1.0;  // L_0^{(k)}(z)
    double sign = 1.0;
    complex<double> diag_sum(0.0, 0.0);
    for (int n = 0; n + k < dim; ++n) {
      const complex<double> elem = s * gauss * lag * beta_k;
      diag_sum += rho(n, n + k) * elem * sign;
      const double next =
          ((2.0 * n + 1.0 + k - z) * lag - (n + k) * lag_prev) / (n + 1.0);
      lag_prev = lag;
      lag = next;
      s *= std::sqrt((n + 1.0) / (n + 1.0 + k));
      sign = -sign;
    }
    acc += (k == 0) ? diag_sum.real() : 2.0 * diag_sum.real();
    beta_k *= beta;
  }
  return kTwoOverPi * acc;
}

}  // namespace qpg
