#include "qpg/gaussian.hpp"

#include <cmath>
#include <stdexcept>

#include "qpg/errors.hpp"

namespace qpg {

namespace {

void check_mode(const GaussianState& state, int mode) {
  if (mode < 0 || mode >= state.modes()) {
    throw std::invalid_argument("mode index out of range");
  }
}

}  // namespace

double db_to_variance_ratio(double db) { return std::pow(10.0, db / 10.0); }

Eigen::Vector2d GaussianState::mode_mean(int mode) const {
  return mean.segment<2>(2 * mode);
}

Eigen::Matrix2d GaussianState::mode_cov(int mode) const {
  return cov.block<2, 2>(2 * mode, 2 * mode);
}

std::vector<double> GaussianState::symplectic_eigenvalues() const {
  const int n = modes();
  if (n == 1) {
    return {std::sqrt(std::max(0.0, cov.determinant()))};
  }
  // Eigenvalues of (Omega*V) come in pairs +-i*nu; recover nu from the
  // spectrum of -(Omega*V)^2, which is nu^2 with multiplicity two.
  const Eigen::MatrixXd m = symplectic_form(n) * cov;
  const Eigen::MatrixXd m2 = -(m * m);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m2);
  std::vector<double> raw(2 * n);
  for (int i = 0; i < 2 * n; ++i) {
    raw[i] = std::sqrt(std::max(0.0, solver.eigenvalues()(i).real()));
  }
  std::sort(raw.begin(), raw.end());
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = raw[2 * i];  // each nu appears twice
  return out;
}

bool GaussianState::is_physical(double tol) const {
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, cov.cwiseAbs().maxCoeff())) {
    return false;
  }
  for (double nu : symplectic_eigenvalues()) {
    if (nu < kVacuumVariance - tol) return false;
  }
  return true;
}

double GaussianState::purity() const {
  const double det = cov.determinant();
  if (det <= 0.0) throw NumericalError("covariance is not positive definite");
  return std::pow(kVacuumVariance, modes()) / std::sqrt(det);
}

GaussianState make_vacuum(int modes) {
  if (modes < 1) throw std::invalid_argument("need at least one mode");
  GaussianState s;
  s.mean = Eigen::VectorXd::Zero(2 * modes);
  s.cov = kVacuumVariance * Eigen::MatrixXd::Identity(2 * modes, 2 * modes);
  return s;
}

GaussianState make_coherent(double mean_x, double mean_p) {
  GaussianState s = make_vacuum(1);
  s.mean << mean_x, mean_p;
  return s;
}

GaussianState make_squeezed_vacuum(double db, Quadrature which) {
  const double ratio = db_to_variance_ratio(db);
  GaussianState s = make_vacuum(1);
  const int sq = which == Quadrature::X ? 0 : 1;
  s.cov(sq, sq) = kVacuumVariance * ratio;
  s.cov(1 - sq, 1 - sq) = kVacuumVariance / ratio;
  return s;
}

GaussianState tensor(const GaussianState& a, const GaussianState& b) {
  const int na = static_cast<int>(a.mean.size());
  const int nb = static_cast<int>(b.mean.size());
  GaussianState s;
  s.mean = Eigen::VectorXd::Zero(na + nb);
  s.mean.head(na) = a.mean;
  s.mean.tail(nb) = b.mean;
  s.cov = Eigen::MatrixXd::Zero(na + nb, na + nb);
  s.cov.topLeftCorner(na, na) = a.cov;
  s.cov.bottomRightCorner(nb, nb) = b.cov;
  return s;
}

Eigen::MatrixXd symplectic_form(int modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  for (int i = 0; i < modes; ++i) {
    omega(2 * i, 2 * i + 1) = 1.0;
    omega(2 * i + 1, 2 * i) = -1.0;
  }
  return omega;
}

bool SymplecticTransform::is_symplectic(double tol) const {
  const Eigen::MatrixXd omega = symplectic_form(modes());
  return (matrix * omega * matrix.transpose() - omega).cwiseAbs().maxCoeff() <
         tol;
}

SymplecticTransform operator*(const SymplecticTransform& t2,
                              const SymplecticTransform& t1) {
  if (t1.modes() != t2.modes()) {
    throw std::invalid_argument("transform mode counts differ");
  }
  return {t2.matrix * t1.matrix, t2.matrix * t1.displacement + t2.displacement};
}

namespace {

SymplecticTransform one_mode(const Eigen::Matrix2d& s,
                             const Eigen::Vector2d& d = Eigen::Vector2d::Zero()) {
  return {s, d};
}

}  // namespace

SymplecticTransform shear(double kappa) {
  Eigen::Matrix2d s;
  s << 1.0, 0.0, kappa, 1.0;
  return one_mode(s);
}

SymplecticTransform fourier() {
  Eigen::Matrix2d s;
  s << 0.0, -1.0, 1.0, 0.0;
  return one_mode(s);
}

SymplecticTransform rotation(double phi) {
  Eigen::Matrix2d s;
  s << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return one_mode(s);
}

SymplecticTransform displace_x(double s) {
  return one_mode(Eigen::Matrix2d::Identity(), {s, 0.0});
}

SymplecticTransform displace_z(double s) {
  return one_mode(Eigen::Matrix2d::Identity(), {0.0, s});
}

SymplecticTransform controlled_z() {
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(4, 4);
  s(1, 2) = 1.0;  // p1 += x2
  s(3, 0) = 1.0;  // p2 += x1
  return {s, Eigen::VectorXd::Zero(4)};
}

SymplecticTransform qnd_sum() {
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(4, 4);
  s(2, 0) = 1.0;   // x_A += x_in
  s(1, 3) = -1.0;  // p_in -= p_A
  return {s, Eigen::VectorXd::Zero(4)};
}

GaussianState apply(const GaussianState& state, const SymplecticTransform& t,
                    const std::vector<int>& modes) {
  if (static_cast<int>(modes.size()) != t.modes()) {
    throw std::invalid_argument("transform/mode-list size mismatch");
  }
  const int n = state.modes();
  for (size_t i = 0; i < modes.size(); ++i) {
    check_mode(state, modes[i]);
    for (size_t j = i + 1; j < modes.size(); ++j) {
      if (modes[i] == modes[j]) {
        throw std::invalid_argument("duplicate mode in mode list");
      }
    }
  }
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(2 * n);
  for (size_t i = 0; i < modes.size(); ++i) {
    d.segment<2>(2 * modes[i]) = t.displacement.segment<2>(2 * i);
    for (size_t j = 0; j < modes.size(); ++j) {
      s.block<2, 2>(2 * modes[i], 2 * modes[j]) =
          t.matrix.block<2, 2>(2 * i, 2 * j);
    }
  }
  GaussianState out;
  out.mean = s * state.mean + d;
  out.cov = s * state.cov * s.transpose();
  return out;
}

GaussianState loss_channel(const GaussianState& state, int mode, double eta) {
  check_mode(state, mode);
  if (eta < 0.0 || eta > 1.0) {
    throw std::invalid_argument("transmission must lie in [0, 1]");
  }
  const int n = state.modes();
  const double root = std::sqrt(eta);
  GaussianState out = state;
  out.mean.segment<2>(2 * mode) *= root;
  for (int i = 0; i < 2 * n; ++i) {
    for (int j = 0; j < 2 * n; ++j) {
      const bool ri = i / 2 == mode;
      const bool rj = j / 2 == mode;
      if (ri && rj) {
        out.cov(i, j) = eta * state.cov(i, j);
      } else if (ri || rj) {
        out.cov(i, j) = root * state.cov(i, j);
      }
    }
  }
  for (int k = 0; k < 2; ++k) {
    out.cov(2 * mode + k, 2 * mode + k) += (1.0 - eta) * kVacuumVariance;
  }
  return out;
}

double rotated_mean(const GaussianState& state, int mode, double theta) {
  check_mode(state, mode);
  const Eigen::Vector2d u(std::sin(theta), std::cos(theta));
  return u.dot(state.mode_mean(mode));
}

double rotated_variance(const GaussianState& state, int mode, double theta) {
  check_mode(state, mode);
  const Eigen::Vector2d u(std::sin(theta), std::cos(theta));
  return u.dot(state.mode_cov(mode) * u);
}

double marginal_pdf(const GaussianState& state, int mode, double theta,
                    double x) {
  const double m = rotated_mean(state, mode, theta);
  const double v = rotated_variance(state, mode, theta);
  if (v <= 0.0) throw NumericalError("degenerate marginal variance");
  const double d = x - m;
  return std::exp(-0.5 * d * d / v) / std::sqrt(2.0 * M_PI * v);
}

HomodyneCondition conditional_homodyne(const GaussianState& state, int mode,
                                       double theta) {
  check_mode(state, mode);
  const int n = state.modes();
  if (n < 2) {
    throw std::invalid_argument("conditioning needs at least one surviving mode");
  }
  const Eigen::Vector2d u(std::sin(theta), std::cos(theta));

  HomodyneCondition c;
  c.outcome_mean = u.dot(state.mode_mean(mode));
  c.outcome_var = u.dot(state.mode_cov(mode) * u);
  if (c.outcome_var < 1e-12) {
    throw NumericalError("measured quadrature variance is degenerate");
  }

  const int rest = 2 * (n - 1);
  Eigen::VectorXd mean_rest(rest);
  Eigen::VectorXd cross(rest);  // Cov(rest, measured observable)
  Eigen::MatrixXd cov_rest(rest, rest);
  int r = 0;
  for (int i = 0; i < 2 * n; ++i) {
    if (i / 2 == mode) continue;
    mean_rest(r) = state.mean(i);
    cross(r) = state.cov(i, 2 * mode) * u(0) + state.cov(i, 2 * mode + 1) * u(1);
    int s = 0;
    for (int j = 0; j < 2 * n; ++j) {
      if (j / 2 == mode) continue;
      cov_rest(r, s++) = state.cov(i, j);
    }
    ++r;
  }

  c.mean_coeff = cross / c.outcome_var;
  c.mean_base = mean_rest - c.mean_coeff * c.outcome_mean;
  c.cov = cov_rest - cross * cross.transpose() / c.outcome_var;
  return c;
}

HomodyneResult homodyne_measure(const GaussianState& state, int mode,
                                double theta, std::optional<double> outcome,
                                Rng* rng) {
  const HomodyneCondition c = conditional_homodyne(state, mode, theta);
  double m = 0.0;
  if (outcome.has_value()) {
    m = *outcome;
  } else {
    if (rng == nullptr) {
      throw std::invalid_argument("need an rng when no outcome is supplied");
    }
    m = rng->normal(c.outcome_mean, std::sqrt(c.outcome_var));
  }
  HomodyneResult result;
  result.outcome = m;
  result.posterior.mean = c.mean_base + c.mean_coeff * m;
  result.posterior.cov = c.cov;
  return result;
}

}  // namespace qpg
