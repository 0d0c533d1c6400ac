#include "qpg/sampling.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qpg/errors.hpp"
#include "qpg/parallel.hpp"

namespace qpg {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr std::size_t kScanBlock = 4096;

HomodyneDataset scan_impl(const GaussianState& state, std::size_t n,
                          std::uint64_t seed, PhaseMode mode, bool parallel) {
  if (state.modes() != 1) {
    throw std::invalid_argument("phase scan expects a single-mode state");
  }
  if (n == 0) throw std::invalid_argument("empty scan requested");
  if (!state.is_physical()) {
    throw std::invalid_argument("scan source state is not physical");
  }

  HomodyneDataset ds;
  ds.seed = seed;
  ds.samples.resize(n);
  HomodyneSample* out = ds.samples.data();
  const std::size_t blocks = par::block_count(n, kScanBlock);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(b));
    const std::size_t begin = static_cast<std::size_t>(b) * kScanBlock;
    const std::size_t end = std::min(n, begin + kScanBlock);
    for (std::size_t i = begin; i < end; ++i) {
      double phase;
      if (mode == PhaseMode::Stratified) {
        phase = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
      } else {
        phase = kTwoPi * rng.uniform();
      }
      const double m = rotated_mean(state, 0, phase);
      const double sd = std::sqrt(rotated_variance(state, 0, phase));
      out[i] = {phase, rng.normal(m, sd)};
    }
  }

  if (mode == PhaseMode::UniformRandom) {
    std::stable_sort(ds.samples.begin(), ds.samples.end(),
                     [](const HomodyneSample& a, const HomodyneSample& b) {
                       return a.phase < b.phase;
                     });
  }
  return ds;
}

}  // namespace

HomodyneDataset phase_scan(const GaussianState& state, std::size_t n,
                           std::uint64_t seed, PhaseMode mode) {
  return scan_impl(state, n, seed, mode, true);
}

HomodyneDataset phase_scan_serial(const GaussianState& state, std::size_t n,
                                  std::uint64_t seed, PhaseMode mode) {
  return scan_impl(state, n, seed, mode, false);
}

void write_csv(const HomodyneDataset& dataset, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path + " for writing");
  f << "phase_rad,quadrature\n";
  char line[80];
  for (const HomodyneSample& s : dataset.samples) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", s.phase, s.value);
    f << line;
  }
  if (!f) throw ConfigError("write failed for " + path);
}

namespace {

double parse_field(const std::string& text, const std::string& path,
                   std::size_t line_no) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE ||
      !std::isfinite(v)) {
    throw ConfigError(path + ":" + std::to_string(line_no) +
                      ": not a finite number: '" + text + "'");
  }
  return v;
}

}  // namespace

HomodyneDataset read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path);

  HomodyneDataset ds;
  ds.source = path;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "phase_rad,quadrature") {
        throw ConfigError(path + ":1: expected header 'phase_rad,quadrature'");
      }
      continue;
    }
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos ||
        line.find(',', comma + 1) != std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected two comma-separated fields");
    }
    HomodyneSample s;
    s.phase = parse_field(line.substr(0, comma), path, line_no);
    s.value = parse_field(line.substr(comma + 1), path, line_no);
    if (s.phase < 0.0 || s.phase >= kTwoPi) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": phase outside [0, 2pi)");
    }
    ds.samples.push_back(s);
  }
  if (line_no == 0) throw ConfigError(path + ": empty file");
  if (ds.samples.empty()) throw ConfigError(path + ": no samples");
  return ds;
}

}  // namespace qpg
