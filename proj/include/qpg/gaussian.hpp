#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "qpg/rng.hpp"

namespace qpg {

// Conventions (used everywhere in this library):
//   [x, p] = i/2, a = x + i p, vacuum variance 1/4 per quadrature.
//   Normalized (shot-noise) variance = 4 * absolute variance, vacuum = 1.
//   Quadrature ordering is interleaved: (x1, p1, x2, p2, ...).
//   The homodyne local-oscillator phase theta selects the observable
//   x*sin(theta) + p*cos(theta); theta = 0 measures p, theta = 90 deg
//   measures x. Keep this in mind when comparing against conventions where
//   phase 0 measures x.
inline constexpr double kVacuumVariance = 0.25;

enum class Quadrature { X, P };

double db_to_variance_ratio(double db);  // 10^(db/10) = e^{-2r}

struct GaussianState {
  Eigen::VectorXd mean;  // length 2N
  Eigen::MatrixXd cov;   // 2N x 2N, symmetric, absolute units

  int modes() const { return static_cast<int>(mean.size()) / 2; }

  // Marginal mean/covariance of one mode (2-vector / 2x2 block).
  Eigen::Vector2d mode_mean(int mode) const;
  Eigen::Matrix2d mode_cov(int mode) const;

  // Symplectic eigenvalues; physical states have all of them >= 1/4.
  std::vector<double> symplectic_eigenvalues() const;
  bool is_physical(double tol = 1e-9) const;

  // (1/4)^N / sqrt(det cov), in (0, 1].
  double purity() const;
};

GaussianState make_vacuum(int modes);
GaussianState make_coherent(double mean_x, double mean_p);
// db <= 0 squeezes the chosen quadrature (variance ratio 10^(db/10)),
// db > 0 anti-squeezes it; the conjugate quadrature gets the inverse ratio.
GaussianState make_squeezed_vacuum(double db, Quadrature which);
GaussianState tensor(const GaussianState& a, const GaussianState& b);

// Standard symplectic form Omega = diag(J, J, ...), J = [[0,1],[-1,0]].
Eigen::MatrixXd symplectic_form(int modes);

// Affine map: mean -> S*mean + d, cov -> S*cov*S^T.
struct SymplecticTransform {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd displacement;

  int modes() const { return static_cast<int>(matrix.rows()) / 2; }
  bool is_symplectic(double tol = 1e-10) const;

  // (t2 * t1) applies t1 first.
  friend SymplecticTransform operator*(const SymplecticTransform& t2,
                                       const SymplecticTransform& t1);
};

SymplecticTransform shear(double kappa);       // x -> x, p -> p + kappa*x
SymplecticTransform fourier();                 // (x, p) -> (-p, x)
SymplecticTransform rotation(double phi);      // [[cos,-sin],[sin,cos]]
SymplecticTransform displace_x(double s);      // <x> += s
SymplecticTransform displace_z(double s);      // <p> += s
SymplecticTransform controlled_z();            // p1 += x2, p2 += x1
// Two-mode QND sum gate, modes (in, A): x_A += x_in, p_in -= p_A.
SymplecticTransform qnd_sum();

// Embeds t into the listed modes of the state (t.modes() == modes.size()).
GaussianState apply(const GaussianState& state, const SymplecticTransform& t,
                    const std::vector<int>& modes);

// Pure-loss channel on one mode: mean *= sqrt(eta), block -> eta*block +
// (1-eta)*vacuum, cross-covariances *= sqrt(eta).
GaussianState loss_channel(const GaussianState& state, int mode, double eta);

// Mean and variance of the rotated quadrature x*sin(theta) + p*cos(theta).
double rotated_mean(const GaussianState& state, int mode, double theta);
double rotated_variance(const GaussianState& state, int mode, double theta);

// Gaussian density of the rotated-quadrature marginal at value x.
double marginal_pdf(const GaussianState& state, int mode, double theta,
                    double x);

// Conditioning data for a homodyne measurement on `mode` at LO phase theta:
// the posterior over the remaining modes has covariance `cov` (independent of
// the outcome) and mean  mean_base + mean_coeff * outcome.
struct HomodyneCondition {
  Eigen::VectorXd mean_base;
  Eigen::VectorXd mean_coeff;
  Eigen::MatrixXd cov;
  double outcome_mean = 0.0;
  double outcome_var = 0.0;
};

HomodyneCondition conditional_homodyne(const GaussianState& state, int mode,
                                       double theta);

struct HomodyneResult {
  double outcome = 0.0;
  GaussianState posterior;  // measured mode removed
};

// If `outcome` is not provided, one is drawn from the exact marginal using
// `rng` (required in that case). Throws NumericalError when the measured
// variance is degenerate (< 1e-12 absolute).
HomodyneResult homodyne_measure(const GaussianState& state, int mode,
                                double theta,
                                std::optional<double> outcome = std::nullopt,
                                Rng* rng = nullptr);

}  // namespace qpg
