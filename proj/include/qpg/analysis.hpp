#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "qpg/gate.hpp"
#include "qpg/gaussian.hpp"

namespace qpg {

// Overlap <psi|rho|psi> of a pure single-mode Gaussian target with another
// Gaussian state, from the closed-form Wigner overlap. The first argument
// must be pure (purity >= 1 - 1e-6).
double fidelity_gaussian(const GaussianState& pure_target,
                         const GaussianState& state);

// Same overlap evaluated independently in the number basis, as a cross-check
// of the closed form. Both states are converted at the given cutoff.
double fidelity_fock_oracle(const GaussianState& pure_target,
                            const GaussianState& state, int cutoff = 30);

// Smallest quadrature variance in dB relative to the shot-noise limit:
// 10 log10 of the least eigenvalue of the normalized covariance 4 V.
double min_variance_db(const Eigen::Matrix2d& cov);

// Actual shear strength read off the mean values, p_out / x_in.
double estimate_kappa_act(double mean_p_out, double mean_x_in);

enum class Scenario {
  SqueezedAncillae,   // finite ancilla squeezing, the realistic case
  VacuumAncillae,     // ancillae in the vacuum, classical bound
  InfiniteSqueezing,  // noiseless limit, exact shear
  ShotNoiseLimit,     // ideal means with vacuum covariance, reference line
};

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& tag);
std::vector<Scenario> all_scenarios();

// Output state of the gate for one scenario. Loss (quantum efficiency
// loss_eta) applies to the physical scenarios; the shot-noise reference
// keeps its vacuum covariance.
GaussianState scenario_output(const GaussianState& input, double kappa,
                              const AncillaSpec& ancillae, Scenario s,
                              double loss_eta = 1.0);

struct CurvePoint {
  double kappa = 0.0;
  Scenario scenario = Scenario::SqueezedAncillae;
  double fidelity = 0.0;
  double min_variance_db = 0.0;
};

// Fidelity against the exact shear output and minimum output variance,
// swept over kappa for every scenario.
std::vector<CurvePoint> theory_curves(const GaussianState& input,
                                      const AncillaSpec& ancillae,
                                      const std::vector<double>& kappas,
                                      double loss_eta = 1.0);

std::vector<double> default_kappa_grid();  // -2.5 .. 2.5, step 0.05

// Header kappa,scenario,fidelity,min_variance_db.
void write_curves_csv(const std::string& path,
                      const std::vector<CurvePoint>& points);

// Uniform ancilla squeezing (in dB, negative) at which the least output
// variance for vacuum input crosses the shot-noise limit at the given
// kappa. Found by bisection. More negative is more demanding; the value
// rises monotonically with kappa toward the limit below. Throws
// std::invalid_argument unless kappa_max > 0.
double ancilla_threshold_db(double kappa_max);

// Closed-form large-kappa threshold with the two output quadratures treated
// as independent noise channels: root of (1 + pc^2 u)(1 + pb^2 u) = 2,
// about -2.77 dB. The decoupling drops the correlation produced by the
// shared B-mode fluctuation, so this is an approximation; see below.
double asymptotic_threshold_db();

// Exact large-kappa limit of ancilla_threshold_db, keeping the shared
// B-mode correlation: root of pb^2 u^2 + (1 + pc^2 - pb^2) u = 1, about
// -2.91 dB. The bisection converges to this value, not to the decoupled
// approximation.
double asymptotic_threshold_exact_db();

}  // namespace qpg
