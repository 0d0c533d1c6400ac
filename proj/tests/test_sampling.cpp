#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "qpg/errors.hpp"
#include "qpg/gaussian.hpp"
#include "qpg/sampling.hpp"

using namespace qpg;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string temp_path(const std::string& name) {
  return "/tmp/qpg_sampling_" + std::to_string(::getpid()) + "_" + name;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

bool identical(const HomodyneDataset& a, const HomodyneDataset& b) {
  if (a.samples.size() != b.samples.size()) return false;
  for (size_t i = 0; i < a.samples.size(); ++i) {
    if (a.samples[i].phase != b.samples[i].phase) return false;
    if (a.samples[i].value != b.samples[i].value) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("stratified scans cover the phase circle on the exact grid") {
  const GaussianState s = make_coherent(0.4, -0.1);
  const std::size_t n = 1000;
  const HomodyneDataset ds = phase_scan(s, n, 11);
  REQUIRE(ds.samples.size() == n);
  CHECK(ds.seed == 11);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(ds.samples[i].phase ==
          kTwoPi * static_cast<double>(i) / static_cast<double>(n));
  }
}

TEST_CASE("random-phase scans are sorted and stay in range") {
  const GaussianState s = make_vacuum(1);
  const HomodyneDataset ds =
      phase_scan(s, 5000, 3, PhaseMode::UniformRandom);
  REQUIRE(ds.samples.size() == 5000);
  for (size_t i = 0; i < ds.samples.size(); ++i) {
    CHECK(ds.samples[i].phase >= 0.0);
    CHECK(ds.samples[i].phase < kTwoPi);
    if (i > 0) CHECK(ds.samples[i - 1].phase <= ds.samples[i].phase);
  }
}

TEST_CASE("scans are reproducible and independent of threading") {
  const GaussianState s = make_squeezed_vacuum(-4.9, Quadrature::X);
  for (std::size_t n : {std::size_t(4097), std::size_t(20000)}) {
    CHECK(identical(phase_scan(s, n, 99), phase_scan_serial(s, n, 99)));
  }
  CHECK(identical(phase_scan(s, 5000, 99), phase_scan(s, 5000, 99)));
  CHECK_FALSE(identical(phase_scan(s, 5000, 99), phase_scan(s, 5000, 100)));
  CHECK(identical(
      phase_scan(s, 5000, 7, PhaseMode::UniformRandom),
      phase_scan_serial(s, 5000, 7, PhaseMode::UniformRandom)));
}

TEST_CASE("scan rejects bad inputs") {
  CHECK_THROWS_AS(phase_scan(make_vacuum(1), 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(phase_scan(make_vacuum(2), 100, 1), std::invalid_argument);
  GaussianState bad = make_vacuum(1);
  bad.cov *= 0.1;
  CHECK_THROWS_AS(phase_scan(bad, 100, 1), std::invalid_argument);
}

TEST_CASE("csv files round trip every sample bitwise") {
  const GaussianState s = make_coherent(1.4, 0.0);
  HomodyneDataset ds = phase_scan(s, 2000, 5);
  ds.source = "round trip check";
  const std::string path = temp_path("roundtrip.csv");
  write_csv(ds, path);
  const HomodyneDataset back = read_csv(path);
  CHECK(identical(ds, back));
  CHECK(back.seed == 0);
  CHECK(back.source == path);
  std::remove(path.c_str());
}

TEST_CASE("csv reader reports malformed files with their location") {
  const std::string path = temp_path("bad.csv");

  write_text(path, "phase,value\n0.1,0.2\n");
  CHECK_THROWS_WITH_AS(read_csv(path),
                       doctest::Contains("expected header"), ConfigError);

  write_text(path, "phase_rad,quadrature\n0.1,0.2\n0.3,abc\n");
  CHECK_THROWS_WITH_AS(read_csv(path), doctest::Contains(":3"), ConfigError);

  write_text(path, "phase_rad,quadrature\n0.1,0.2,0.3\n");
  CHECK_THROWS_WITH_AS(read_csv(path),
                       doctest::Contains("two comma-separated fields"),
                       ConfigError);

  write_text(path, "phase_rad,quadrature\n7.0,0.2\n");
  CHECK_THROWS_WITH_AS(read_csv(path), doctest::Contains("phase outside"),
                       ConfigError);

  write_text(path, "phase_rad,quadrature\n-0.1,0.2\n");
  CHECK_THROWS_AS(read_csv(path), ConfigError);

  write_text(path, "");
  CHECK_THROWS_WITH_AS(read_csv(path), doctest::Contains("empty file"),
                       ConfigError);

  write_text(path, "phase_rad,quadrature\n");
  CHECK_THROWS_WITH_AS(read_csv(path), doctest::Contains("no samples"),
                       ConfigError);

  CHECK_THROWS_AS(read_csv(temp_path("missing.csv")), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("windowed sample variance follows the rotated quadrature") {
  const GaussianState s = make_squeezed_vacuum(-5.2, Quadrature::X);
  const std::size_t n = 200000;
  const HomodyneDataset ds = phase_scan(s, n, 12345);

  const int windows = 20;
  std::vector<double> sum(windows, 0.0), sum2(windows, 0.0);
  std::vector<int> count(windows, 0);
  for (const HomodyneSample& smp : ds.samples) {
    int w = static_cast<int>(smp.phase / kTwoPi * windows);
    if (w >= windows) w = windows - 1;
    sum[w] += smp.value;
    sum2[w] += smp.value * smp.value;
    ++count[w];
  }
  for (int w = 0; w < windows; ++w) {
    REQUIRE(count[w] > 1000);
    const double mean = sum[w] / count[w];
    const double var = sum2[w] / count[w] - mean * mean;
    const double center = kTwoPi * (w + 0.5) / windows;
    const double expected = rotated_variance(s, 0, center);
    // Allow for the variance sweep across the window plus sampling noise.
    CHECK(var == doctest::Approx(expected).epsilon(0.12));
  }
}

TEST_CASE("pooled second moments converge like the square root of n") {
  GaussianState s = make_squeezed_vacuum(-4.3, Quadrature::X);
  s.mean << 0.8, -0.5;

  // Phase-averaged second moment of the samples.
  double expected = 0.0;
  const int grid = 4096;
  for (int i = 0; i < grid; ++i) {
    const double theta = kTwoPi * i / grid;
    const double m = rotated_mean(s, 0, theta);
    expected += (m * m + rotated_variance(s, 0, theta)) / grid;
  }

  double err_small = 0.0;
  for (std::size_t n : {std::size_t(1000), std::size_t(10000),
                        std::size_t(100000)}) {
    const HomodyneDataset ds = phase_scan(s, n, 31415);
    double m2 = 0.0;
    for (const HomodyneSample& smp : ds.samples) m2 += smp.value * smp.value;
    m2 /= static_cast<double>(n);
    const double err = std::abs(m2 - expected);
    // Second moments of a gaussian have variance of order the squared
    // moment, so a six sigma band around the 1/sqrt(n) law is safe.
    CHECK(err < 6.0 * expected * std::sqrt(2.0 / static_cast<double>(n)));
    if (n == 1000) err_small = err;
  }
  CHECK(err_small < 0.2 * expected);
}
