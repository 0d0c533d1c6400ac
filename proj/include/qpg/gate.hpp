#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "qpg/gaussian.hpp"
#include "qpg/rng.hpp"

namespace qpg {

// Homodyne settings that realize the gate of strength kappa: the LO phase is
// arctan(kappa) and the feedforward rescales the outcome by sqrt(1+kappa^2).
struct MeasurementParams {
  double theta = 0.0;
  double gain = 1.0;
};

MeasurementParams measurement_params(double kappa);

// Squeezing levels (dB, <= 0 squeezes) of the three ancilla modes entering
// the cluster: A feeds the output x quadrature, B feeds both quadratures
// through the QND interaction, C feeds p.
struct AncillaSpec {
  double r_a_db = 0.0;
  double r_b_db = 0.0;
  double r_c_db = 0.0;

  static AncillaSpec vacuum() { return {0.0, 0.0, 0.0}; }
  static AncillaSpec uniform(double db) { return {db, db, db}; }
  // Squeezing levels of the reference experiment.
  static AncillaSpec default_squeezed() { return {-4.3, -4.9, -5.2}; }
};

// Couplings of the ancilla vacuum fluctuations into the output quadratures:
//   delta_x = xA - xb * xB,   delta_p = pb * kappa * xB + pc * pC
// (each symbol an e^{-r}-scaled vacuum operator). The shared xB term makes
// the two output quadratures correlated. Identities: pc^2 - xb^2 = 1 and
// xb * pc = pb^2 = 1/sqrt(5).
struct NoiseCouplings {
  double xb;  // (sqrt5 - 1) / (2 * 5^{1/4})
  double pb;  // 5^{-1/4}
  double pc;  // (sqrt5 + 1) / (2 * 5^{1/4})
};

NoiseCouplings noise_couplings();

// Gaussian channel of the measurement-based gate at finite squeezing:
// mean -> transfer * mean, cov -> transfer * cov * transfer^T + noise.
struct GateChannel {
  Eigen::Matrix2d transfer;
  Eigen::Matrix2d noise;  // absolute units
};

GateChannel gate_channel(double kappa, const AncillaSpec& ancillae);

// Applies the finite-squeezing channel to a single-mode state.
GaussianState apply_noisy_gate(const GaussianState& input, double kappa,
                               const AncillaSpec& ancillae);

// Single-ancilla teleportation pipeline, evaluated deterministically:
// input (x) squeezed-vacuum ancilla, QND sum, homodyne of the input mode at
// arctan(kappa), feedforward displacement of p by gain * outcome, ensemble
// average over outcomes (conditional covariance plus the rank-one
// outcome-variance term). Converges to shear(kappa) as ancilla_r_db -> -inf.
GaussianState ideal_gate_channel(const GaussianState& input, double kappa,
                                 double ancilla_r_db);

// One Monte Carlo shot of the gate. Covariances are outcome-independent;
// the feedforward shifts the mean of p by gain * outcome.
struct TrajectoryRecord {
  double outcome = 0.0;  // raw homodyne value p0
  double kappa = 0.0;
  AncillaSpec ancillae;
  GaussianState pre_feedforward;
  GaussianState post_feedforward;
};

TrajectoryRecord run_trajectory(const GaussianState& input, double kappa,
                                const AncillaSpec& ancillae, Rng& rng,
                                bool feedforward = true);

// Moment summary of a trajectory batch. The ensemble-averaged state has
// mean `mean` and covariance state_cov + mean_cov.
struct TrajectoryEnsemble {
  std::size_t count = 0;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d mean_cov = Eigen::Matrix2d::Zero();   // scatter of means
  Eigen::Matrix2d state_cov = Eigen::Matrix2d::Zero();  // per-shot covariance
  double outcome_mean = 0.0;
  double outcome_var = 0.0;

  Eigen::Matrix2d ensemble_cov() const { return state_cov + mean_cov; }
};

// Deterministic for fixed (input, kappa, ancillae, seed, count): work is
// split into fixed-size blocks with one RNG substream each, so the parallel
// and serial paths produce bitwise-identical summaries.
TrajectoryEnsemble run_trajectory_batch(const GaussianState& input,
                                        double kappa,
                                        const AncillaSpec& ancillae,
                                        std::uint64_t seed, std::size_t count);
TrajectoryEnsemble run_trajectory_batch_serial(const GaussianState& input,
                                               double kappa,
                                               const AncillaSpec& ancillae,
                                               std::uint64_t seed,
                                               std::size_t count);

// shear(kappa) = rotation(phi2) * diag(e^-r, e^r) * rotation(phi1),
// with r >= 0 and phi1 in (-pi/2, pi/2].
struct ShearDecomposition {
  double phi2 = 0.0;
  double r = 0.0;
  double phi1 = 0.0;

  // Squeeze factor e^{2r} expressed in dB.
  double squeeze_db() const;
};

ShearDecomposition decompose_shear(double kappa);

}  // namespace qpg
