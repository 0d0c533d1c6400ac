#include "qpg/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "qpg/errors.hpp"

namespace qpg {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct OccupiedBin {
  int phase;
  int value;
  double count;
};

struct Likelihood {
  Eigen::VectorXd probs;  // per occupied bin, includes the bin width
  double log_likelihood;
};

Likelihood evaluate(const Eigen::MatrixXcd& rho,
                    const Eigen::MatrixXcd& projectors,
                    const std::vector<OccupiedBin>& bins, double bin_width,
                    bool parallel) {
  const int nb = static_cast<int>(bins.size());
  Eigen::VectorXd probs(nb);
#pragma omp parallel for schedule(static) if (parallel)
  for (int b = 0; b < nb; ++b) {
    const Eigen::VectorXcd psi = projectors.row(b).transpose();
    probs(b) = (psi.adjoint() * rho * psi).real()(0) * bin_width;
  }
  double ll = 0.0;
  for (int b = 0; b < nb; ++b) {
    if (probs(b) < 1e-300) {
      throw NumericalError(
          "likelihood underflow: cutoff or x_max too small for the data");
    }
    ll += bins[b].count * std::log(probs(b));
  }
  return {std::move(probs), ll};
}

Eigen::MatrixXcd build_r(const Eigen::VectorXd& probs,
                         const Eigen::MatrixXcd& projectors,
                         const std::vector<OccupiedBin>& bins, double total,
                         bool parallel) {
  const int dim = static_cast<int>(projectors.cols());
  const int nb = static_cast<int>(bins.size());
  Eigen::VectorXd weights(nb);
  for (int b = 0; b < nb; ++b) {
    weights(b) = bins[b].count / (total * probs(b));
  }
  Eigen::MatrixXcd r(dim, dim);
  // Each entry sums the bins in a fixed order, so the result does not
  // depend on the thread count.
#pragma omp parallel for schedule(static) if (parallel)
  for (int n = 0; n < dim; ++n) {
    for (int m = n; m < dim; ++m) {
      std::complex<double> acc(0.0, 0.0);
      for (int b = 0; b < nb; ++b) {
        acc += weights(b) * projectors(b, n) * std::conj(projectors(b, m));
      }
      r(n, m) = acc;
      r(m, n) = std::conj(acc);
    }
  }
  return r;
}

Eigen::MatrixXcd apply_step(const Eigen::MatrixXcd& r,
                            const Eigen::MatrixXcd& rho) {
  Eigen::MatrixXcd next = r * rho * r;
  next = 0.5 * (next + next.adjoint().eval());
  const double tr = next.trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr)) {
    throw NumericalError("reconstruction step lost normalization");
  }
  return next / tr;
}

}  // namespace

double QuadratureHistogram::phase_center(int p) const {
  return (p + 0.5) * kPi / phase_bins;
}

double QuadratureHistogram::value_center(int q) const {
  return -x_max + (q + 0.5) * bin_width();
}

QuadratureHistogram bin_samples(const HomodyneDataset& data, int phase_bins,
                                int value_bins, double x_max) {
  if (phase_bins < 1 || value_bins < 1) {
    throw std::invalid_argument("bin_samples: bin counts must be positive");
  }
  if (!(x_max > 0.0)) {
    throw std::invalid_argument("bin_samples: x_max must be positive");
  }
  QuadratureHistogram hist;
  hist.phase_bins = phase_bins;
  hist.value_bins = value_bins;
  hist.x_max = x_max;
  hist.counts = Eigen::MatrixXd::Zero(phase_bins, value_bins);
  const double width = hist.bin_width();
  for (const HomodyneSample& s : data.samples) {
    double theta = s.phase;
    double value = s.value;
    if (theta >= kPi) {
      theta -= kPi;
      value = -value;
    }
    if (value < -x_max || value > x_max) {
      ++hist.overflow;
      continue;
    }
    int p = static_cast<int>(theta / kPi * phase_bins);
    p = std::min(std::max(p, 0), phase_bins - 1);
    int q = static_cast<int>((value + x_max) / width);
    q = std::min(std::max(q, 0), value_bins - 1);
    hist.counts(p, q) += 1.0;
    ++hist.total;
  }
  return hist;
}

Eigen::VectorXcd quadrature_projector(double theta, double x, int dim) {
  const Eigen::VectorXd phi = hermite_functions(x, dim);
  Eigen::VectorXcd psi(dim);
  const double eta = 0.5 * kPi - theta;
  for (int n = 0; n < dim; ++n) {
    psi(n) = std::polar(phi(n), eta * double(n));
  }
  return psi;
}

MleResult mle_reconstruct(const QuadratureHistogram& hist, int cutoff,
                          const MleOptions& options) {
  if (cutoff < 2) throw std::invalid_argument("mle_reconstruct: cutoff < 2");
  if (hist.total == 0) {
    throw ConfigError("mle_reconstruct: histogram has no in-range samples");
  }

  std::vector<OccupiedBin> bins;
  for (int p = 0; p < hist.phase_bins; ++p) {
    for (int q = 0; q < hist.value_bins; ++q) {
      const double c = hist.counts(p, q);
      if (c > 0.0) bins.push_back({p, q, c});
    }
  }
  if (bins.size() < 2) {
    throw ConfigError("mle_reconstruct: data is degenerate (single bin)");
  }

  Eigen::MatrixXcd projectors(bins.size(), cutoff);
  for (size_t b = 0; b < bins.size(); ++b) {
    projectors.row(b) =
        quadrature_projector(hist.phase_center(bins[b].phase),
                             hist.value_center(bins[b].value), cutoff)
            .transpose();
  }

  const double total = static_cast<double>(hist.total);
  const double width = hist.bin_width();
  const bool par = options.parallel;

  MleResult out;
  Eigen::MatrixXcd rho =
      Eigen::MatrixXcd::Identity(cutoff, cutoff) / double(cutoff);
  Likelihood cur = evaluate(rho, projectors, bins, width, par);
  out.diagnostics.stop_reason = "max_iter";

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const double slack = 1e-12 * (1.0 + std::abs(cur.log_likelihood));
    const Eigen::MatrixXcd r =
        build_r(cur.probs, projectors, bins, total, par);
    Eigen::MatrixXcd next = apply_step(r, rho);
    Likelihood cand = evaluate(next, projectors, bins, width, par);
    if (cand.log_likelihood < cur.log_likelihood - slack) {
      // Half step: mix the full update back into the current iterate.
      next = 0.5 * rho + 0.5 * next;
      cand = evaluate(next, projectors, bins, width, par);
      if (cand.log_likelihood < cur.log_likelihood - slack) {
        out.diagnostics.stop_reason = "stalled";
        break;
      }
    }
    const double delta = cand.log_likelihood - cur.log_likelihood;
    rho = std::move(next);
    cur = std::move(cand);
    out.diagnostics.iterations = iter;
    out.diagnostics.log_likelihood.push_back(cur.log_likelihood);
    if (std::abs(delta) <= options.tol * (1.0 + std::abs(cur.log_likelihood))) {
      out.diagnostics.stop_reason = "converged";
      break;
    }
  }

  out.diagnostics.final_log_likelihood = cur.log_likelihood;
  out.rho.rho = std::move(rho);
  return out;
}

StateMoments moments(const FockDensityMatrix& state) {
  const int dim = state.cutoff();
  const Eigen::MatrixXcd a = ladder_lower(dim);
  const std::complex<double> ma = (state.rho * a).trace();
  const std::complex<double> maa = (state.rho * a * a).trace();
  const double nbar = (state.rho * number_operator(dim)).trace().real();

  StateMoments m;
  m.mean_x = ma.real();
  m.mean_p = ma.imag();
  const double xx = (2.0 * maa.real() + 2.0 * nbar + 1.0) / 4.0;
  const double pp = (-2.0 * maa.real() + 2.0 * nbar + 1.0) / 4.0;
  const double xp = maa.imag() / 2.0;
  m.cov(0, 0) = xx - m.mean_x * m.mean_x;
  m.cov(1, 1) = pp - m.mean_p * m.mean_p;
  m.cov(0, 1) = m.cov(1, 0) = xp - m.mean_x * m.mean_p;
  return m;
}

namespace {

WignerGrid wigner_impl(const FockDensityMatrix& state,
                       const std::vector<double>& xs,
                       const std::vector<double>& ps, bool parallel) {
  const double deficit = std::abs(1.0 - state.rho.trace().real());
  if (deficit > 0.01) {
    throw NumericalError(
        "wigner: density matrix trace is off by more than 1%, cutoff is "
        "too small for this state");
  }
  WignerGrid grid;
  grid.xs = xs;
  grid.ps = ps;
  const int nx = static_cast<int>(xs.size());
  const int np = static_cast<int>(ps.size());
  grid.values.resize(nx, np);
  const long long points = static_cast<long long>(nx) * np;
#pragma omp parallel for schedule(static) if (parallel)
  for (long long t = 0; t < points; ++t) {
    const int i = static_cast<int>(t / np);
    const int j = static_cast<int>(t % np);
    grid.values(i, j) = wigner_point(state.rho, xs[i], ps[j]);
  }
  return grid;
}

}  // namespace

WignerGrid wigner(const FockDensityMatrix& state, const std::vector<double>& xs,
                  const std::vector<double>& ps, bool parallel) {
  return wigner_impl(state, xs, ps, parallel);
}

WignerGrid wigner_serial(const FockDensityMatrix& state,
                         const std::vector<double>& xs,
                         const std::vector<double>& ps) {
  return wigner_impl(state, xs, ps, false);
}

}  // namespace qpg
