#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpg/gaussian.hpp"

namespace qpg {

struct HomodyneSample {
  double phase = 0.0;  // LO phase, radians, [0, 2pi)
  double value = 0.0;  // quadrature outcome, absolute units
};

struct HomodyneDataset {
  std::vector<HomodyneSample> samples;
  std::string source;      // free-form description of the scanned state
  std::uint64_t seed = 0;  // generator seed (0 when read from a file)
};

enum class PhaseMode {
  Stratified,     // phase_i = 2*pi*i/n, default
  UniformRandom,  // i.i.d. phases, sorted ascending
};

// Draws n samples of the rotated quadrature of a single-mode Gaussian state
// across a full phase turn. Samples are generated block-wise from RNG
// substreams: output is bitwise identical for any thread count, and the
// serial variant reproduces it exactly.
HomodyneDataset phase_scan(const GaussianState& state, std::size_t n,
                           std::uint64_t seed,
                           PhaseMode mode = PhaseMode::Stratified);
HomodyneDataset phase_scan_serial(const GaussianState& state, std::size_t n,
                                  std::uint64_t seed,
                                  PhaseMode mode = PhaseMode::Stratified);

// CSV interchange: header "phase_rad,quadrature", one sample per row, 17
// significant digits (round-trips exactly), LF line endings.
void write_csv(const HomodyneDataset& dataset, const std::string& path);
HomodyneDataset read_csv(const std::string& path);

}  // namespace qpg
