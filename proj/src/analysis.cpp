#include "qpg/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "qpg/errors.hpp"
#include "qpg/fock.hpp"

namespace qpg {

namespace {

GaussianState single_mode(const Eigen::Vector2d& mean,
                          const Eigen::Matrix2d& cov) {
  GaussianState s;
  s.mean = mean;
  s.cov = cov;
  return s;
}

// Least normalized eigenvalue of the vacuum-input output covariance at
// uniform ancilla squeezing `db`.
double least_output_eig(double kappa, double db) {
  const GateChannel ch = gate_channel(kappa, AncillaSpec::uniform(db));
  const Eigen::Matrix2d v =
      kVacuumVariance * ch.transfer * ch.transfer.transpose() + ch.noise;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(4.0 * v);
  return es.eigenvalues()(0);
}

}  // namespace

double fidelity_gaussian(const GaussianState& pure_target,
                         const GaussianState& state) {
  if (pure_target.modes() != 1 || state.modes() != 1) {
    throw std::invalid_argument("fidelity_gaussian expects single modes");
  }
  if (pure_target.purity() < 1.0 - 1e-6) {
    throw std::invalid_argument("fidelity_gaussian: target is not pure");
  }
  const Eigen::Matrix2d sigma = pure_target.cov + state.cov;
  const double det = sigma.determinant();
  if (!(det > 0.0)) {
    throw NumericalError("fidelity_gaussian: degenerate covariance sum");
  }
  const Eigen::Vector2d delta = state.mean - pure_target.mean;
  const double quad = delta.dot(sigma.inverse() * delta);
  return std::exp(-0.5 * quad) / (2.0 * std::sqrt(det));
}

double fidelity_fock_oracle(const GaussianState& pure_target,
                            const GaussianState& state, int cutoff) {
  const Eigen::VectorXcd psi = gaussian_to_fock_pure(pure_target, cutoff);
  const FockDensityMatrix rho = gaussian_to_fock(state, cutoff);
  return (psi.adjoint() * rho.rho * psi).real()(0);
}

double min_variance_db(const Eigen::Matrix2d& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(4.0 * cov);
  const double lo = es.eigenvalues()(0);
  if (!(lo > 0.0)) {
    throw NumericalError("min_variance_db: covariance is not positive");
  }
  return 10.0 * std::log10(lo);
}

double estimate_kappa_act(double mean_p_out, double mean_x_in) {
  if (std::abs(mean_x_in) < 1e-9) {
    throw std::invalid_argument(
        "estimate_kappa_act: input x mean is too small to divide by");
  }
  return mean_p_out / mean_x_in;
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::SqueezedAncillae:
      return "squeezed-ancillae";
    case Scenario::VacuumAncillae:
      return "vacuum-ancillae";
    case Scenario::InfiniteSqueezing:
      return "infinite-squeezing";
    case Scenario::ShotNoiseLimit:
      return "shot-noise-limit";
  }
  throw std::invalid_argument("unknown scenario");
}

Scenario scenario_from_string(const std::string& tag) {
  for (Scenario s : all_scenarios()) {
    if (to_string(s) == tag) return s;
  }
  throw ConfigError("unknown scenario tag: " + tag);
}

std::vector<Scenario> all_scenarios() {
  return {Scenario::SqueezedAncillae, Scenario::VacuumAncillae,
          Scenario::InfiniteSqueezing, Scenario::ShotNoiseLimit};
}

GaussianState scenario_output(const GaussianState& input, double kappa,
                              const AncillaSpec& ancillae, Scenario s,
                              double loss_eta) {
  if (input.modes() != 1) {
    throw std::invalid_argument("scenario_output expects a single mode");
  }
  if (!(loss_eta > 0.0) || loss_eta > 1.0) {
    throw std::invalid_argument("scenario_output: loss_eta must be in (0, 1]");
  }
  const Eigen::Matrix2d a = shear(kappa).matrix;
  GaussianState out;
  switch (s) {
    case Scenario::SqueezedAncillae:
      out = apply_noisy_gate(input, kappa, ancillae);
      break;
    case Scenario::VacuumAncillae:
      out = apply_noisy_gate(input, kappa, AncillaSpec::vacuum());
      break;
    case Scenario::InfiniteSqueezing:
      out = single_mode(a * input.mean, a * input.cov * a.transpose());
      break;
    case Scenario::ShotNoiseLimit:
      return single_mode(a * input.mean,
                         kVacuumVariance * Eigen::Matrix2d::Identity());
  }
  if (loss_eta < 1.0) out = loss_channel(out, 0, loss_eta);
  return out;
}

std::vector<CurvePoint> theory_curves(const GaussianState& input,
                                      const AncillaSpec& ancillae,
                                      const std::vector<double>& kappas,
                                      double loss_eta) {
  std::vector<CurvePoint> points;
  points.reserve(kappas.size() * 4);
  for (double kappa : kappas) {
    const Eigen::Matrix2d a = shear(kappa).matrix;
    const GaussianState target =
        single_mode(a * input.mean, a * input.cov * a.transpose());
    for (Scenario s : all_scenarios()) {
      const GaussianState out =
          scenario_output(input, kappa, ancillae, s, loss_eta);
      CurvePoint pt;
      pt.kappa = kappa;
      pt.scenario = s;
      pt.fidelity = fidelity_gaussian(target, out);
      pt.min_variance_db = min_variance_db(out.cov);
      points.push_back(pt);
    }
  }
  return points;
}

std::vector<double> default_kappa_grid() {
  std::vector<double> grid;
  grid.reserve(101);
  for (int i = -50; i <= 50; ++i) grid.push_back(i * 0.05);
  return grid;
}

void write_curves_csv(const std::string& path,
                      const std::vector<CurvePoint>& points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "kappa,scenario,fidelity,min_variance_db\n";
  char line[160];
  for (const CurvePoint& p : points) {
    std::snprintf(line, sizeof(line), "%.17g,%s,%.17g,%.17g\n", p.kappa,
                  to_string(p.scenario).c_str(), p.fidelity,
                  p.min_variance_db);
    out << line;
  }
  if (!out.good()) throw ConfigError("failed while writing " + path);
}

double ancilla_threshold_db(double kappa_max) {
  if (!(kappa_max > 0.0)) {
    throw std::invalid_argument("ancilla_threshold_db: kappa_max must be > 0");
  }
  double hi = 0.0;     // vacuum ancillae, above the shot-noise limit
  double lo = -60.0;   // deeply squeezed, below it
  if (least_output_eig(kappa_max, hi) <= 1.0) return hi;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (least_output_eig(kappa_max, mid) > 1.0) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo < 1e-13) break;
  }
  return 0.5 * (lo + hi);
}

double asymptotic_threshold_db() {
  // Decoupled form: (1 + pc^2 u)(1 + pb^2 u) = 2 in the variance ratio
  // u = 10^(db/10), which ignores the cross-correlation of the two output
  // quadratures.
  const NoiseCouplings c = noise_couplings();
  const double qa = c.pc * c.pc * c.pb * c.pb;
  const double qb = c.pc * c.pc + c.pb * c.pb;
  const double u = (-qb + std::sqrt(qb * qb + 4.0 * qa)) / (2.0 * qa);
  return 10.0 * std::log10(u);
}

double asymptotic_threshold_exact_db() {
  // Keeping the correlation, the large-kappa crossing condition becomes
  //   pb^2 u^2 + (1 + pc^2 - pb^2) u - 1 = 0.
  const NoiseCouplings c = noise_couplings();
  const double qa = c.pb * c.pb;
  const double qb = 1.0 + c.pc * c.pc - c.pb * c.pb;
  const double u = (-qb + std::sqrt(qb * qb + 4.0 * qa)) / (2.0 * qa);
  return 10.0 * std::log10(u);
}

}  // namespace qpg
