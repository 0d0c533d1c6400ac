#pragma once

#include <Eigen/Dense>

#include <complex>

#include "qpg/gaussian.hpp"

namespace qpg {

// Number-basis density matrix truncated to `cutoff` levels (0..cutoff-1).
struct FockDensityMatrix {
  Eigen::MatrixXcd rho;

  int cutoff() const { return static_cast<int>(rho.rows()); }
  bool is_valid(double tol = 1e-9) const;
};

// Annihilation operator a on `dim` levels; a = x + i p with [x, p] = i/2.
Eigen::MatrixXcd ladder_lower(int dim);
Eigen::MatrixXcd number_operator(int dim);

// Hermite functions phi_0..phi_{count-1} at x, orthonormal for the vacuum
// variance 1/4: phi_0(x) = (2/pi)^{1/4} exp(-x^2). Stable two-term
// recurrence, no factorials.
Eigen::VectorXd hermite_functions(double x, int count);

// exp(alpha a^dag - conj(alpha) a); on vacuum gives mean (Re alpha, Im alpha).
Eigen::MatrixXcd displacement_operator(std::complex<double> alpha, int dim);
// exp(r (a^2 - a^dag^2) / 2); squeezes x by e^{-r}.
Eigen::MatrixXcd squeeze_operator(double r, int dim);
// diag(e^{i n phi}); rotates phase space by rotation(phi).
Eigen::MatrixXcd rotation_operator(double phi, int dim);

// Number-basis representation of a single-mode Gaussian state, built from its
// thermal/squeeze/rotate/displace decomposition at a padded working dimension.
// Throws NumericalError when the truncated trace misses more than 0.1%.
FockDensityMatrix gaussian_to_fock(const GaussianState& state, int cutoff);

// Number-basis vector of a pure single-mode Gaussian state (purity must be
// >= 1 - 1e-6). Same tail-mass check as above.
Eigen::VectorXcd gaussian_to_fock_pure(const GaussianState& state, int cutoff);

// Wigner value at one phase-space point (absolute units, normalized over
// dx dp: vacuum peaks at 2/pi, Fock |1> reaches -2/pi at the origin).
double wigner_point(const Eigen::MatrixXcd& rho, double x, double p);

}  // namespace qpg
