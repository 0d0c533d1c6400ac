#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "qpg/errors.hpp"
#include "qpg/gaussian.hpp"

using namespace qpg;

namespace {

constexpr double kPi = 3.14159265358979323846;

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("vacuum and coherent states sit at the shot-noise limit") {
  const GaussianState vac = make_vacuum(2);
  CHECK(vac.modes() == 2);
  CHECK(vac.mean.cwiseAbs().maxCoeff() == 0.0);
  CHECK(max_abs_diff(vac.cov, kVacuumVariance * Eigen::MatrixXd::Identity(
                                  4, 4)) == 0.0);
  CHECK(vac.purity() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vac.is_physical());
  for (double nu : vac.symplectic_eigenvalues()) {
    CHECK(nu == doctest::Approx(kVacuumVariance).epsilon(1e-9));
  }

  const GaussianState coh = make_coherent(0.3, 0.9);
  CHECK(coh.mean(0) == 0.3);
  CHECK(coh.mean(1) == 0.9);
  CHECK(max_abs_diff(coh.cov, vac.mode_cov(0)) == 0.0);
}

TEST_CASE("squeezed vacuum follows the decibel variance ratio") {
  CHECK(db_to_variance_ratio(0.0) == 1.0);
  CHECK(db_to_variance_ratio(-10.0) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(db_to_variance_ratio(-6.0) ==
        doctest::Approx(0.251188643150958).epsilon(1e-12));

  const GaussianState sq = make_squeezed_vacuum(-6.0, Quadrature::X);
  CHECK(sq.cov(0, 0) ==
        doctest::Approx(kVacuumVariance * 0.251188643150958).epsilon(1e-12));
  CHECK(sq.cov(1, 1) ==
        doctest::Approx(kVacuumVariance / 0.251188643150958).epsilon(1e-12));
  CHECK(sq.cov(0, 1) == 0.0);
  CHECK(sq.purity() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sq.is_physical());

  // Positive dB anti-squeezes the chosen quadrature instead.
  const GaussianState anti = make_squeezed_vacuum(3.0, Quadrature::P);
  CHECK(anti.cov(1, 1) > kVacuumVariance);
  CHECK(anti.cov(0, 0) < kVacuumVariance);
}

TEST_CASE("tensor product stacks modes without cross terms") {
  const GaussianState s =
      tensor(make_coherent(1.0, 2.0), make_squeezed_vacuum(-4.3, Quadrature::X));
  CHECK(s.modes() == 2);
  CHECK(max_abs_diff(s.mode_mean(0), Eigen::Vector2d(1.0, 2.0)) == 0.0);
  CHECK(s.mode_mean(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.cov.block<2, 2>(0, 2).cwiseAbs().maxCoeff() == 0.0);
  const double ratio = db_to_variance_ratio(-4.3);
  CHECK(s.mode_cov(1)(0, 0) ==
        doctest::Approx(kVacuumVariance * ratio).epsilon(1e-12));
  CHECK(s.mode_cov(1)(1, 1) ==
        doctest::Approx(kVacuumVariance / ratio).epsilon(1e-12));
}

TEST_CASE("elementary transforms are symplectic with pinned matrices") {
  CHECK(shear(1.7).is_symplectic());
  CHECK(fourier().is_symplectic());
  CHECK(rotation(0.9).is_symplectic());
  CHECK(controlled_z().is_symplectic());
  CHECK(qnd_sum().is_symplectic());

  Eigen::Matrix2d sh;
  sh << 1.0, 0.0, 1.7, 1.0;
  CHECK(max_abs_diff(shear(1.7).matrix, sh) == 0.0);

  Eigen::MatrixXd qnd(4, 4);
  qnd << 1, 0, 0, 0,
         0, 1, 0, -1,
         1, 0, 1, 0,
         0, 0, 0, 1;
  CHECK(max_abs_diff(qnd_sum().matrix, qnd) == 0.0);
  CHECK(qnd_sum().displacement.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("qnd sum equals a fourier-conjugated controlled-z") {
  // Rotating the second mode into the fourier frame turns the cz coupling
  // into the sum gate.
  SymplecticTransform f2{Eigen::MatrixXd::Identity(4, 4),
                         Eigen::VectorXd::Zero(4)};
  f2.matrix.block<2, 2>(2, 2) = fourier().matrix;
  SymplecticTransform f2inv{Eigen::MatrixXd::Identity(4, 4),
                            Eigen::VectorXd::Zero(4)};
  f2inv.matrix.block<2, 2>(2, 2) = fourier().matrix.inverse();

  const SymplecticTransform composed = f2inv * (controlled_z() * f2);
  CHECK(max_abs_diff(composed.matrix, qnd_sum().matrix) < 1e-14);
}

TEST_CASE("transform composition applies the right factor first") {
  const GaussianState in = make_coherent(1.0, 0.0);
  const GaussianState a = apply(in, displace_x(1.0) * fourier(), {0});
  CHECK(a.mode_mean(0)(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a.mode_mean(0)(1) == doctest::Approx(1.0).epsilon(1e-14));
  const GaussianState b = apply(in, fourier() * displace_x(1.0), {0});
  CHECK(b.mode_mean(0)(0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(b.mode_mean(0)(1) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("apply embeds a transform into the listed modes only") {
  GaussianState s = tensor(tensor(make_coherent(0.4, -0.2),
                                  make_coherent(1.0, 1.0)),
                           make_coherent(-0.6, 0.8));
  const GaussianState out = apply(s, qnd_sum(), {0, 2});
  // Transform mode 0 acts on state mode 0, transform mode 1 on state mode 2.
  CHECK(max_abs_diff(out.mode_mean(1), Eigen::Vector2d(1.0, 1.0)) == 0.0);
  CHECK(out.mode_mean(2)(0) == doctest::Approx(-0.6 + 0.4).epsilon(1e-14));
  CHECK(out.mode_mean(2)(1) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(out.mode_mean(0)(0) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(out.mode_mean(0)(1) == doctest::Approx(-0.2 - 0.8).epsilon(1e-14));

  const GaussianState single = apply(s, shear(2.0), {1});
  CHECK(max_abs_diff(single.mode_mean(0), s.mode_mean(0)) == 0.0);
  CHECK(max_abs_diff(single.mode_mean(2), s.mode_mean(2)) == 0.0);
  CHECK(single.mode_mean(1)(1) == doctest::Approx(1.0 + 2.0).epsilon(1e-14));

  CHECK_THROWS_AS(apply(s, qnd_sum(), {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(apply(s, qnd_sum(), {0, 3}), std::invalid_argument);
  CHECK_THROWS_AS(apply(s, qnd_sum(), {0}), std::invalid_argument);
}

TEST_CASE("rotated moments interpolate between the quadratures") {
  GaussianState s = make_squeezed_vacuum(-5.2, Quadrature::X);
  s.mean << 0.3, 0.9;
  const double vx = s.cov(0, 0);
  const double vp = s.cov(1, 1);

  // theta = 0 reads p, theta = pi/2 reads x.
  CHECK(rotated_mean(s, 0, 0.0) == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(rotated_mean(s, 0, kPi / 2.0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(rotated_variance(s, 0, 0.0) == doctest::Approx(vp).epsilon(1e-14));
  CHECK(rotated_variance(s, 0, kPi / 2.0) ==
        doctest::Approx(vx).epsilon(1e-12));

  const double theta = 0.7;
  const double st = std::sin(theta), ct = std::cos(theta);
  CHECK(rotated_mean(s, 0, theta) ==
        doctest::Approx(0.3 * st + 0.9 * ct).epsilon(1e-14));
  CHECK(rotated_variance(s, 0, theta) ==
        doctest::Approx(vx * st * st + vp * ct * ct).epsilon(1e-14));
}

TEST_CASE("marginal pdf is the gaussian of the rotated quadrature") {
  const GaussianState s = make_coherent(0.3, 0.9);
  const double v = kVacuumVariance;
  for (double x : {-1.0, 0.0, 0.9, 2.3}) {
    const double expected =
        std::exp(-0.5 * (x - 0.9) * (x - 0.9) / v) / std::sqrt(2.0 * kPi * v);
    CHECK(marginal_pdf(s, 0, 0.0, x) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  double integral = 0.0;
  const double step = 0.001;
  for (double x = -6.0; x <= 6.0; x += step) {
    integral += marginal_pdf(s, 0, 1.1, x) * step;
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("loss channel contracts means and mixes in vacuum noise") {
  const GaussianState coh = loss_channel(make_coherent(2.0, -1.0), 0, 0.49);
  CHECK(coh.mean(0) == doctest::Approx(1.4).epsilon(1e-14));
  CHECK(coh.mean(1) == doctest::Approx(-0.7).epsilon(1e-14));
  CHECK(max_abs_diff(coh.cov, kVacuumVariance * Eigen::Matrix2d::Identity()) <
        1e-15);

  // 0.93 transmission of a -4.9 dB squeezed beam in normalized units.
  const GaussianState sq =
      loss_channel(make_squeezed_vacuum(-4.9, Quadrature::X), 0, 0.93);
  CHECK(4.0 * sq.cov(0, 0) ==
        doctest::Approx(0.370942100945).epsilon(1e-10));

  // Cross-covariances to untouched modes scale with sqrt(eta).
  GaussianState pair = apply(tensor(make_vacuum(1), make_vacuum(1)),
                             qnd_sum(), {0, 1});
  const double cross = pair.cov(0, 2);
  CHECK(cross != 0.0);
  const GaussianState lossy = loss_channel(pair, 0, 0.36);
  CHECK(lossy.cov(0, 2) == doctest::Approx(0.6 * cross).epsilon(1e-12));
  CHECK(lossy.cov(2, 2) == pair.cov(2, 2));

  const GaussianState same = loss_channel(pair, 1, 1.0);
  CHECK(max_abs_diff(same.cov, pair.cov) == 0.0);

  CHECK_THROWS_AS(loss_channel(pair, 0, 1.2), std::invalid_argument);
  CHECK_THROWS_AS(loss_channel(pair, 0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(loss_channel(pair, 5, 0.9), std::invalid_argument);
}

TEST_CASE("conditional homodyne of a qnd-coupled pair") {
  const GaussianState joint =
      apply(tensor(make_coherent(0.7, 0.0), make_coherent(1.4, 0.0)),
            qnd_sum(), {0, 1});
  // Reading x on the second mode at theta = pi/2.
  const HomodyneCondition c = conditional_homodyne(joint, 1, kPi / 2.0);
  CHECK(c.outcome_mean == doctest::Approx(2.1).epsilon(1e-12));
  CHECK(c.outcome_var == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c.cov(0, 0) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(c.cov(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(c.cov(0, 1)) < 1e-12);
  CHECK(c.mean_base(0) == doctest::Approx(-0.35).epsilon(1e-12));
  CHECK(c.mean_coeff(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(c.mean_coeff(1)) < 1e-12);

  // Feeding the mean outcome back reproduces the unconditional mean.
  const HomodyneResult r = homodyne_measure(joint, 1, kPi / 2.0, 2.1);
  CHECK(r.outcome == 2.1);
  CHECK(r.posterior.modes() == 1);
  CHECK(r.posterior.mean(0) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(r.posterior.mean(1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(max_abs_diff(r.posterior.cov, c.cov) == 0.0);
}

TEST_CASE("homodyne phase zero reads p and phase pi over two reads x") {
  const GaussianState pair = tensor(make_coherent(0.3, 0.9), make_vacuum(1));
  CHECK(conditional_homodyne(pair, 0, 0.0).outcome_mean ==
        doctest::Approx(0.9).epsilon(1e-12));
  CHECK(conditional_homodyne(pair, 0, kPi / 2.0).outcome_mean ==
        doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("sampled homodyne outcomes match the marginal statistics") {
  const GaussianState pair = tensor(make_coherent(0.3, 0.9), make_vacuum(1));
  Rng rng(991);
  const int n = 20000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = homodyne_measure(pair, 0, 0.0, std::nullopt, &rng).outcome;
    sum += y;
    sum2 += y * y;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean - 0.9) < 5.0 * std::sqrt(kVacuumVariance / n));
  CHECK(std::abs(var - kVacuumVariance) <
        5.0 * kVacuumVariance * std::sqrt(2.0 / n));

  // Same seed, same stream.
  Rng r1(7), r2(7);
  CHECK(homodyne_measure(pair, 0, 0.3, std::nullopt, &r1).outcome ==
        homodyne_measure(pair, 0, 0.3, std::nullopt, &r2).outcome);

  CHECK_THROWS_AS(homodyne_measure(pair, 0, 0.0, std::nullopt, nullptr),
                  std::invalid_argument);
}

TEST_CASE("symplectic spectrum separates physical from unphysical states") {
  GaussianState thermal = make_vacuum(1);
  thermal.cov *= 2.0;
  const std::vector<double> nus = thermal.symplectic_eigenvalues();
  CHECK(nus.size() == 1);
  CHECK(nus[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(thermal.is_physical());
  CHECK(thermal.purity() == doctest::Approx(0.5).epsilon(1e-12));

  GaussianState bad = make_vacuum(1);
  bad.cov *= 0.8;  // below the vacuum floor in both quadratures
  CHECK_FALSE(bad.is_physical());

  // A two-mode pure state keeps both symplectic eigenvalues at 1/4.
  const GaussianState pure2 =
      apply(tensor(make_squeezed_vacuum(-3.0, Quadrature::X), make_vacuum(1)),
            qnd_sum(), {0, 1});
  for (double nu : pure2.symplectic_eigenvalues()) {
    CHECK(nu == doctest::Approx(kVacuumVariance).epsilon(1e-9));
  }
  CHECK(pure2.purity() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("degenerate measured variance raises a numerical error") {
  const GaussianState pair =
      tensor(make_squeezed_vacuum(-120.0, Quadrature::X), make_vacuum(1));
  CHECK_THROWS_AS(conditional_homodyne(pair, 0, kPi / 2.0), NumericalError);
  // Single-mode states cannot be conditioned at all.
  CHECK_THROWS_AS(conditional_homodyne(make_vacuum(1), 0, 0.0),
                  std::invalid_argument);
}
