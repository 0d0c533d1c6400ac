// Timing harness for the parallel kernels against their serial references.
// Each row checks that both paths produce identical results before timing.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "qpg/analysis.hpp"
#include "qpg/gate.hpp"
#include "qpg/gaussian.hpp"
#include "qpg/parallel.hpp"
#include "qpg/sampling.hpp"
#include "qpg/tomography.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

void report(const char* name, double serial_ms, double parallel_ms,
            bool match) {
  std::printf("%-24s serial %9.1f ms   parallel %9.1f ms   x%-5.2f %s\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms,
              match ? "outputs match" : "OUTPUTS DIFFER");
}

template <typename Derived>
bool bitwise_equal(const Eigen::MatrixBase<Derived>& a,
                   const Eigen::MatrixBase<Derived>& b) {
  return (a - b).cwiseAbs().maxCoeff() == 0.0;
}

double dataset_checksum(const qpg::HomodyneDataset& ds) {
  double acc = 0.0;
  for (const qpg::HomodyneSample& s : ds.samples) {
    acc += s.phase + s.value;
  }
  return acc;
}

void bench_phase_scan() {
  const qpg::GaussianState state = qpg::apply_noisy_gate(
      qpg::make_coherent(1.4, 0.0), 2.0, qpg::AncillaSpec::default_squeezed());
  const std::size_t n = 4000000;

  auto t0 = Clock::now();
  const qpg::HomodyneDataset serial = qpg::phase_scan_serial(state, n, 7);
  const double serial_ms = ms_since(t0);
  t0 = Clock::now();
  const qpg::HomodyneDataset parallel = qpg::phase_scan(state, n, 7);
  const double parallel_ms = ms_since(t0);

  report("phase_scan", serial_ms, parallel_ms,
         dataset_checksum(serial) == dataset_checksum(parallel));
}

void bench_trajectories() {
  const qpg::GaussianState input = qpg::make_coherent(1.4, 0.0);
  const qpg::AncillaSpec anc = qpg::AncillaSpec::default_squeezed();
  const std::size_t n = 2000000;

  auto t0 = Clock::now();
  const qpg::TrajectoryEnsemble serial =
      qpg::run_trajectory_batch_serial(input, 2.0, anc, 11, n);
  const double serial_ms = ms_since(t0);
  t0 = Clock::now();
  const qpg::TrajectoryEnsemble parallel =
      qpg::run_trajectory_batch(input, 2.0, anc, 11, n);
  const double parallel_ms = ms_since(t0);

  const bool match = bitwise_equal(serial.mean, parallel.mean) &&
                     bitwise_equal(serial.ensemble_cov(),
                                   parallel.ensemble_cov()) &&
                     serial.outcome_var == parallel.outcome_var;
  report("trajectory_batch", serial_ms, parallel_ms, match);
}

void bench_mle() {
  const qpg::GaussianState state = qpg::apply_noisy_gate(
      qpg::make_coherent(0.5, 0.0), 2.0, qpg::AncillaSpec::default_squeezed());
  const qpg::HomodyneDataset ds = qpg::phase_scan(state, 80000, 3);
  const qpg::QuadratureHistogram hist = qpg::bin_samples(ds, 60, 128, 6.0);

  qpg::MleOptions opt;
  opt.max_iter = 40;  // fixed work, convergence not the point here
  opt.tol = 0.0;

  opt.parallel = false;
  auto t0 = Clock::now();
  const qpg::MleResult serial = qpg::mle_reconstruct(hist, 14, opt);
  const double serial_ms = ms_since(t0);
  opt.parallel = true;
  t0 = Clock::now();
  const qpg::MleResult parallel = qpg::mle_reconstruct(hist, 14, opt);
  const double parallel_ms = ms_since(t0);

  const bool match = (serial.rho.rho - parallel.rho.rho).cwiseAbs()
                         .maxCoeff() == 0.0;
  report("mle_iterations", serial_ms, parallel_ms, match);
}

void bench_wigner() {
  const qpg::FockDensityMatrix rho = qpg::gaussian_to_fock(
      qpg::apply_noisy_gate(qpg::make_coherent(0.5, 0.0), 2.0,
                            qpg::AncillaSpec::default_squeezed()),
      32);
  std::vector<double> axis;
  for (int i = 0; i <= 120; ++i) axis.push_back(-4.5 + i * 0.075);

  auto t0 = Clock::now();
  const qpg::WignerGrid serial = qpg::wigner_serial(rho, axis, axis);
  const double serial_ms = ms_since(t0);
  t0 = Clock::now();
  const qpg::WignerGrid parallel = qpg::wigner(rho, axis, axis);
  const double parallel_ms = ms_since(t0);

  report("wigner_grid", serial_ms, parallel_ms,
         bitwise_equal(serial.values, parallel.values));
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", qpg::par::max_threads());
  bench_phase_scan();
  bench_trajectories();
  bench_mle();
  bench_wigner();
  return 0;
}
