#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "qpg/fock.hpp"
#include "qpg/sampling.hpp"

namespace qpg {

// Binned homodyne data on a phase x value grid. Phases are folded into
// [0, pi): a sample at theta >= pi is equivalent to one at theta - pi with
// the value negated. Values land in Q uniform bins spanning [-x_max, x_max]
// in absolute quadrature units; samples outside are counted as overflow and
// excluded from the fit.
struct QuadratureHistogram {
  int phase_bins = 0;
  int value_bins = 0;
  double x_max = 0.0;
  Eigen::MatrixXd counts;  // phase_bins x value_bins
  long long total = 0;     // in-range samples
  long long overflow = 0;

  double phase_center(int p) const;
  double value_center(int q) const;
  double bin_width() const { return 2.0 * x_max / value_bins; }
};

QuadratureHistogram bin_samples(const HomodyneDataset& data, int phase_bins,
                                int value_bins, double x_max);

// Projector vector for outcome x of the quadrature measured at LO phase
// theta: psi_n = e^{i n (pi/2 - theta)} phi_n(x). At theta = pi/2 this is
// the x basis (real Hermite functions); theta = 0 gives the p basis.
Eigen::VectorXcd quadrature_projector(double theta, double x, int dim);

struct MleOptions {
  int max_iter = 2000;
  double tol = 1e-9;
  bool parallel = true;
};

struct MleDiagnostics {
  int iterations = 0;
  double final_log_likelihood = 0.0;
  std::string stop_reason;  // "converged", "max_iter" or "stalled"
  std::vector<double> log_likelihood;  // value after each iteration
};

struct MleResult {
  FockDensityMatrix rho;
  MleDiagnostics diagnostics;
};

// Iterative R rho R maximum-likelihood reconstruction from binned homodyne
// data. Starts from the maximally mixed state; every iterate is Hermitian,
// positive and trace-one by construction. When a full step lowers the
// likelihood it is halved (equal mixture of the current iterate and the
// full update); if even that lowers it the previous iterate is kept and
// iteration stops.
MleResult mle_reconstruct(const QuadratureHistogram& hist, int cutoff,
                          const MleOptions& options = {});

struct StateMoments {
  double mean_x = 0.0;
  double mean_p = 0.0;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();  // symmetrized, absolute
};

StateMoments moments(const FockDensityMatrix& state);

struct WignerGrid {
  std::vector<double> xs;
  std::vector<double> ps;
  Eigen::MatrixXd values;  // rows follow xs, columns follow ps
};

// Wigner function on a rectangular grid, absolute units. Throws
// NumericalError when tr(rho) is more than 1% away from one (the cutoff is
// then too small for the state to be represented faithfully).
WignerGrid wigner(const FockDensityMatrix& state, const std::vector<double>& xs,
                  const std::vector<double>& ps, bool parallel = true);
WignerGrid wigner_serial(const FockDensityMatrix& state,
                         const std::vector<double>& xs,
                         const std::vector<double>& ps);

}  // namespace qpg
