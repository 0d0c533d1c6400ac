#pragma once

#include <string>
#include <vector>

#include "qpg/analysis.hpp"
#include "qpg/gate.hpp"
#include "qpg/gaussian.hpp"
#include "qpg/tomography.hpp"

namespace qpg {

// Input state of the gate; either a coherent state or squeezed vacuum.
struct InputSpec {
  enum class Kind { Coherent, Squeezed };

  Kind kind = Kind::Coherent;
  double mean_x = 1.4;
  double mean_p = 0.0;
  double db = -6.0;                     // squeezed input only
  Quadrature axis = Quadrature::X;      // squeezed input only

  GaussianState make() const;
};

struct TomographyConfig {
  int cutoff = 14;
  int phase_bins = 60;
  int value_bins = 128;
  double x_max = 6.0;  // absolute quadrature units
  double tol = 1e-9;
  int max_iter = 2000;
};

// Run description accepted by the command-line tool. JSON with
// schema_version 1; unknown keys anywhere are rejected.
struct ExperimentConfig {
  std::vector<double> kappas = {0.0, 1.0, 1.5, 2.0};
  bool kappas_explicit = false;  // true when the config file listed kappas
  InputSpec input;
  AncillaSpec ancillae = AncillaSpec::default_squeezed();
  std::string scenario = "all";
  long long samples_per_scan = 80000;
  double loss_eta = 1.0;
  TomographyConfig tomography;

  std::vector<Scenario> scenarios() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Round-trip of the parsed configuration, with every default filled in, as
// a JSON string with sorted keys. Embedded in result files so a run is
// reproducible from its output alone.
std::string config_echo_json(const ExperimentConfig& config);

// Writes via a temporary file plus rename, so readers never observe a
// half-written artifact.
void atomic_write_text(const std::string& path, const std::string& content);

void write_density_matrix_json(const std::string& path,
                               const FockDensityMatrix& rho,
                               const std::string& config_echo);

// Header x,p,w; one row per grid point, x-major.
void write_wigner_csv(const std::string& path, const WignerGrid& grid);

}  // namespace qpg
