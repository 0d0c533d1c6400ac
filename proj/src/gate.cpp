#include "qpg/gate.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qpg/parallel.hpp"

namespace qpg {

namespace {

constexpr std::size_t kTrajectoryBlock = 4096;

void require_single_mode(const GaussianState& state) {
  if (state.modes() != 1) {
    throw std::invalid_argument("gate input must be a single-mode state");
  }
}

// Lower Cholesky factor of a symmetric PSD 2x2 matrix; tolerates exact zeros
// on the diagonal (infinitely squeezed ancillae give a vanishing noise block).
Eigen::Matrix2d chol2(const Eigen::Matrix2d& m) {
  Eigen::Matrix2d l = Eigen::Matrix2d::Zero();
  const double a = std::max(0.0, m(0, 0));
  l(0, 0) = std::sqrt(a);
  l(1, 0) = l(0, 0) > 0.0 ? m(1, 0) / l(0, 0) : 0.0;
  l(1, 1) = std::sqrt(std::max(0.0, m(1, 1) - l(1, 0) * l(1, 0)));
  return l;
}

struct BlockSums {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d outer = Eigen::Matrix2d::Zero();
  double outcome = 0.0;
  double outcome_sq = 0.0;
};

TrajectoryEnsemble batch_impl(const GaussianState& input, double kappa,
                              const AncillaSpec& ancillae, std::uint64_t seed,
                              std::size_t count, bool parallel) {
  require_single_mode(input);
  if (count == 0) throw std::invalid_argument("empty trajectory batch");
  const GateChannel ch = gate_channel(kappa, ancillae);
  const Eigen::Matrix2d noise_l = chol2(ch.noise);
  const double gain = measurement_params(kappa).gain;
  const Eigen::Vector2d base_mean = ch.transfer * input.mean;
  const double meas_mean = input.mean(1) + kappa * input.mean(0);
  const double meas_sd =
      std::sqrt(input.cov(1, 1) + 2.0 * kappa * input.cov(0, 1) +
                kappa * kappa * input.cov(0, 0));

  const std::size_t blocks = par::block_count(count, kTrajectoryBlock);
  std::vector<BlockSums> sums(blocks);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(b));
    const std::size_t begin = static_cast<std::size_t>(b) * kTrajectoryBlock;
    const std::size_t end = std::min(count, begin + kTrajectoryBlock);
    BlockSums s;
    for (std::size_t i = begin; i < end; ++i) {
      const Eigen::Vector2d z(rng.normal(), rng.normal());
      const Eigen::Vector2d delta = noise_l * z;
      const double eps = meas_sd * rng.normal();
      const Eigen::Vector2d mean = base_mean + delta;
      const double scaled_outcome = meas_mean + eps + delta(1);
      s.mean += mean;
      s.outer += mean * mean.transpose();
      const double p0 = scaled_outcome / gain;
      s.outcome += p0;
      s.outcome_sq += p0 * p0;
    }
    sums[b] = s;
  }

  BlockSums total;
  for (const BlockSums& s : sums) {  // fixed order keeps results bitwise stable
    total.mean += s.mean;
    total.outer += s.outer;
    total.outcome += s.outcome;
    total.outcome_sq += s.outcome_sq;
  }

  const double n = static_cast<double>(count);
  TrajectoryEnsemble e;
  e.count = count;
  e.mean = total.mean / n;
  e.mean_cov = total.outer / n - e.mean * e.mean.transpose();
  e.state_cov = ch.transfer * input.cov * ch.transfer.transpose();
  e.outcome_mean = total.outcome / n;
  e.outcome_var = total.outcome_sq / n - e.outcome_mean * e.outcome_mean;
  return e;
}

}  // namespace

MeasurementParams measurement_params(double kappa) {
  return {std::atan(kappa), std::sqrt(1.0 + kappa * kappa)};
}

NoiseCouplings noise_couplings() {
  const double s5 = std::sqrt(5.0);
  const double q5 = std::pow(5.0, 0.25);
  return {(s5 - 1.0) / (2.0 * q5), 1.0 / q5, (s5 + 1.0) / (2.0 * q5)};
}

GateChannel gate_channel(double kappa, const AncillaSpec& ancillae) {
  const NoiseCouplings c = noise_couplings();
  const double ua = db_to_variance_ratio(ancillae.r_a_db);
  const double ub = db_to_variance_ratio(ancillae.r_b_db);
  const double uc = db_to_variance_ratio(ancillae.r_c_db);

  GateChannel ch;
  ch.transfer << 1.0, 0.0, kappa, 1.0;
  // delta_x and delta_p share the B-mode fluctuation, hence the off-diagonal
  // term; dropping it would misplace the large-kappa noise floor.
  const double nxx = ua + c.xb * c.xb * ub;
  const double nxp = -c.xb * c.pb * kappa * ub;
  const double npp = c.pb * c.pb * kappa * kappa * ub + c.pc * c.pc * uc;
  ch.noise << nxx, nxp, nxp, npp;
  ch.noise *= kVacuumVariance;
  return ch;
}

GaussianState apply_noisy_gate(const GaussianState& input, double kappa,
                               const AncillaSpec& ancillae) {
  require_single_mode(input);
  if (!input.is_physical()) {
    throw std::invalid_argument("input state is not physical");
  }
  const GateChannel ch = gate_channel(kappa, ancillae);
  GaussianState out;
  out.mean = ch.transfer * input.mean;
  out.cov = ch.transfer * input.cov * ch.transfer.transpose() + ch.noise;
  return out;
}

GaussianState ideal_gate_channel(const GaussianState& input, double kappa,
                                 double ancilla_r_db) {
  require_single_mode(input);
  const MeasurementParams mp = measurement_params(kappa);
  const GaussianState joint =
      apply(tensor(input, make_squeezed_vacuum(ancilla_r_db, Quadrature::X)),
            qnd_sum(), {0, 1});
  const HomodyneCondition c = conditional_homodyne(joint, 0, mp.theta);

  // Ensemble average over outcomes m ~ N(outcome_mean, outcome_var): the
  // feedforward adds (0, gain*m) to the conditional mean, so the averaged
  // covariance picks up a rank-one term from the outcome scatter.
  Eigen::Vector2d ff(0.0, mp.gain);
  const Eigen::Vector2d v = c.mean_coeff + ff;
  GaussianState out;
  out.mean = c.mean_base + c.mean_coeff * c.outcome_mean + ff * c.outcome_mean;
  out.cov = c.cov + c.outcome_var * v * v.transpose();
  return out;
}

TrajectoryRecord run_trajectory(const GaussianState& input, double kappa,
                                const AncillaSpec& ancillae, Rng& rng,
                                bool feedforward) {
  require_single_mode(input);
  const GateChannel ch = gate_channel(kappa, ancillae);
  const Eigen::Matrix2d noise_l = chol2(ch.noise);
  const double gain = measurement_params(kappa).gain;

  const Eigen::Vector2d z(rng.normal(), rng.normal());
  const Eigen::Vector2d delta = noise_l * z;
  const double meas_mean = input.mean(1) + kappa * input.mean(0);
  const double meas_var = input.cov(1, 1) + 2.0 * kappa * input.cov(0, 1) +
                          kappa * kappa * input.cov(0, 0);
  const double eps = std::sqrt(meas_var) * rng.normal();
  const double scaled_outcome = meas_mean + eps + delta(1);

  TrajectoryRecord rec;
  rec.outcome = scaled_outcome / gain;
  rec.kappa = kappa;
  rec.ancillae = ancillae;

  const Eigen::Matrix2d cov = ch.transfer * input.cov * ch.transfer.transpose();
  GaussianState post;
  post.mean = ch.transfer * input.mean + delta;
  post.cov = cov;
  GaussianState pre;
  pre.mean = post.mean - Eigen::Vector2d(0.0, scaled_outcome);
  pre.cov = cov;
  rec.pre_feedforward = pre;
  rec.post_feedforward = feedforward ? post : pre;
  return rec;
}

TrajectoryEnsemble run_trajectory_batch(const GaussianState& input,
                                        double kappa,
                                        const AncillaSpec& ancillae,
                                        std::uint64_t seed,
                                        std::size_t count) {
  return batch_impl(input, kappa, ancillae, seed, count, true);
}

TrajectoryEnsemble run_trajectory_batch_serial(const GaussianState& input,
                                               double kappa,
                                               const AncillaSpec& ancillae,
                                               std::uint64_t seed,
                                               std::size_t count) {
  return batch_impl(input, kappa, ancillae, seed, count, false);
}

double ShearDecomposition::squeeze_db() const {
  return 10.0 * std::log10(std::exp(2.0 * r));
}

ShearDecomposition decompose_shear(double kappa) {
  // M^T M = [[1+k^2, k],[k, 1]] = R(-phi1) diag(e^-2r, e^2r) R(phi1);
  // the small-eigenvalue eigenvector fixes phi1, then R(phi2) = M R1^T D^-1.
  const double a = 1.0 + kappa * kappa;
  const double b = kappa;
  const double mid = 0.5 * (a + 1.0);
  const double disc = std::sqrt(0.25 * (a - 1.0) * (a - 1.0) + b * b);
  const double lam_small = mid - disc;

  ShearDecomposition d;
  d.r = 0.5 * std::log(mid + disc);
  double phi1 = std::atan2(a - lam_small, b);
  if (phi1 > M_PI / 2.0) phi1 -= M_PI;
  if (phi1 <= -M_PI / 2.0) phi1 += M_PI;
  d.phi1 = phi1;

  const Eigen::Matrix2d m = shear(kappa).matrix;
  const Eigen::Matrix2d r1t = rotation(-phi1).matrix;
  Eigen::Matrix2d dinv = Eigen::Matrix2d::Zero();
  dinv(0, 0) = std::exp(d.r);
  dinv(1, 1) = std::exp(-d.r);
  const Eigen::Matrix2d r2 = m * r1t * dinv;
  d.phi2 = std::atan2(r2(1, 0), r2(0, 0));
  return d;
}

}  // namespace qpg
