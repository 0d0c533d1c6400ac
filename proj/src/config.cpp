#include "qpg/config.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "qpg/errors.hpp"

namespace qpg {

namespace {

using nlohmann::json;

void require_known_keys(const json& obj, const std::string& where,
                        std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
    }
  }
}

double get_number(const json& obj, const std::string& where,
                  const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    throw ConfigError(where + "." + key + " must be a number");
  }
  const double x = v.get<double>();
  if (!std::isfinite(x)) {
    throw ConfigError(where + "." + key + " must be finite");
  }
  return x;
}

long long get_integer(const json& obj, const std::string& where,
                      const char* key, long long fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError(where + "." + key + " must be an integer");
  }
  return v.get<long long>();
}

std::string get_string(const json& obj, const std::string& where,
                       const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) {
    throw ConfigError(where + "." + key + " must be a string");
  }
  return v.get<std::string>();
}

InputSpec parse_input(const json& obj) {
  InputSpec spec;
  if (!obj.is_object()) throw ConfigError("input must be an object");
  const std::string type = get_string(obj, "input", "type", "coherent");
  if (type == "coherent") {
    require_known_keys(obj, "input", {"type", "mean_x", "mean_p"});
    spec.kind = InputSpec::Kind::Coherent;
    spec.mean_x = get_number(obj, "input", "mean_x", spec.mean_x);
    spec.mean_p = get_number(obj, "input", "mean_p", spec.mean_p);
  } else if (type == "squeezed") {
    require_known_keys(obj, "input", {"type", "db", "quadrature"});
    spec.kind = InputSpec::Kind::Squeezed;
    spec.db = get_number(obj, "input", "db", spec.db);
    const std::string quad = get_string(obj, "input", "quadrature", "x");
    if (quad == "x") {
      spec.axis = Quadrature::X;
    } else if (quad == "p") {
      spec.axis = Quadrature::P;
    } else {
      throw ConfigError("input.quadrature must be \"x\" or \"p\"");
    }
  } else {
    throw ConfigError("input.type must be \"coherent\" or \"squeezed\"");
  }
  return spec;
}

AncillaSpec parse_ancillae(const json& obj) {
  if (!obj.is_object()) throw ConfigError("ancillae must be an object");
  require_known_keys(obj, "ancillae", {"a_db", "b_db", "c_db"});
  AncillaSpec spec = AncillaSpec::default_squeezed();
  spec.r_a_db = get_number(obj, "ancillae", "a_db", spec.r_a_db);
  spec.r_b_db = get_number(obj, "ancillae", "b_db", spec.r_b_db);
  spec.r_c_db = get_number(obj, "ancillae", "c_db", spec.r_c_db);
  for (double db : {spec.r_a_db, spec.r_b_db, spec.r_c_db}) {
    if (db > 0.0) {
      throw ConfigError("ancilla squeezing must be <= 0 dB");
    }
  }
  return spec;
}

TomographyConfig parse_tomography(const json& obj) {
  if (!obj.is_object()) throw ConfigError("tomography must be an object");
  require_known_keys(obj, "tomography",
                     {"cutoff", "phase_bins", "value_bins", "x_max", "tol",
                      "max_iter"});
  TomographyConfig t;
  t.cutoff = static_cast<int>(
      get_integer(obj, "tomography", "cutoff", t.cutoff));
  t.phase_bins = static_cast<int>(
      get_integer(obj, "tomography", "phase_bins", t.phase_bins));
  t.value_bins = static_cast<int>(
      get_integer(obj, "tomography", "value_bins", t.value_bins));
  t.x_max = get_number(obj, "tomography", "x_max", t.x_max);
  t.tol = get_number(obj, "tomography", "tol", t.tol);
  t.max_iter = static_cast<int>(
      get_integer(obj, "tomography", "max_iter", t.max_iter));
  if (t.cutoff < 4 || t.cutoff > 60) {
    throw ConfigError("tomography.cutoff must be in [4, 60]");
  }
  if (t.phase_bins < 4 || t.phase_bins > 720) {
    throw ConfigError("tomography.phase_bins must be in [4, 720]");
  }
  if (t.value_bins < 16 || t.value_bins > 4096) {
    throw ConfigError("tomography.value_bins must be in [16, 4096]");
  }
  if (!(t.x_max > 0.0)) throw ConfigError("tomography.x_max must be > 0");
  if (!(t.tol > 0.0)) throw ConfigError("tomography.tol must be > 0");
  if (t.max_iter < 1) throw ConfigError("tomography.max_iter must be >= 1");
  return t;
}

}  // namespace

GaussianState InputSpec::make() const {
  if (kind == Kind::Coherent) return make_coherent(mean_x, mean_p);
  return make_squeezed_vacuum(db, axis);
}

std::vector<Scenario> ExperimentConfig::scenarios() const {
  if (scenario == "all") return all_scenarios();
  return {scenario_from_string(scenario)};
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  require_known_keys(root, "config",
                     {"schema_version", "kappas", "input", "ancillae",
                      "scenario", "samples_per_scan", "loss_eta",
                      "tomography"});
  const long long version = get_integer(root, "config", "schema_version", -1);
  if (version != 1) {
    throw ConfigError("config.schema_version must be present and equal to 1");
  }

  ExperimentConfig cfg;
  if (root.contains("kappas")) {
    const json& arr = root.at("kappas");
    if (!arr.is_array() || arr.empty()) {
      throw ConfigError("kappas must be a non-empty array of numbers");
    }
    cfg.kappas.clear();
    cfg.kappas_explicit = true;
    for (const json& v : arr) {
      if (!v.is_number() || !std::isfinite(v.get<double>())) {
        throw ConfigError("kappas must contain finite numbers");
      }
      cfg.kappas.push_back(v.get<double>());
    }
  }
  if (root.contains("input")) cfg.input = parse_input(root.at("input"));
  if (root.contains("ancillae")) {
    cfg.ancillae = parse_ancillae(root.at("ancillae"));
  }
  cfg.scenario = get_string(root, "config", "scenario", cfg.scenario);
  if (cfg.scenario != "all") scenario_from_string(cfg.scenario);
  cfg.samples_per_scan = get_integer(root, "config", "samples_per_scan",
                                     cfg.samples_per_scan);
  if (cfg.samples_per_scan < 100) {
    throw ConfigError("samples_per_scan must be >= 100");
  }
  cfg.loss_eta = get_number(root, "config", "loss_eta", cfg.loss_eta);
  if (!(cfg.loss_eta > 0.0) || cfg.loss_eta > 1.0) {
    throw ConfigError("loss_eta must be in (0, 1]");
  }
  if (root.contains("tomography")) {
    cfg.tomography = parse_tomography(root.at("tomography"));
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_echo_json(const ExperimentConfig& config) {
  json input;
  if (config.input.kind == InputSpec::Kind::Coherent) {
    input = {{"type", "coherent"},
             {"mean_x", config.input.mean_x},
             {"mean_p", config.input.mean_p}};
  } else {
    input = {{"type", "squeezed"},
             {"db", config.input.db},
             {"quadrature", config.input.axis == Quadrature::X ? "x" : "p"}};
  }
  const json root = {
      {"schema_version", 1},
      {"kappas", config.kappas},
      {"input", input},
      {"ancillae",
       {{"a_db", config.ancillae.r_a_db},
        {"b_db", config.ancillae.r_b_db},
        {"c_db", config.ancillae.r_c_db}}},
      {"scenario", config.scenario},
      {"samples_per_scan", config.samples_per_scan},
      {"loss_eta", config.loss_eta},
      {"tomography",
       {{"cutoff", config.tomography.cutoff},
        {"phase_bins", config.tomography.phase_bins},
        {"value_bins", config.tomography.value_bins},
        {"x_max", config.tomography.x_max},
        {"tol", config.tomography.tol},
        {"max_iter", config.tomography.max_iter}}},
  };
  return root.dump(2);
}

void atomic_write_text(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + tmp + " for writing");
    out << content;
    if (!out.good()) throw ConfigError("failed while writing " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw ConfigError("cannot rename " + tmp + " to " + path);
  }
}

void write_density_matrix_json(const std::string& path,
                               const FockDensityMatrix& rho,
                               const std::string& config_echo) {
  const int n = rho.cutoff();
  json real = json::array();
  json imag = json::array();
  for (int r = 0; r < n; ++r) {
    json row_r = json::array();
    json row_i = json::array();
    for (int c = 0; c < n; ++c) {
      row_r.push_back(rho.rho(r, c).real());
      row_i.push_back(rho.rho(r, c).imag());
    }
    real.push_back(std::move(row_r));
    imag.push_back(std::move(row_i));
  }
  json root = {{"schema_version", 1},
               {"cutoff", n},
               {"real", std::move(real)},
               {"imag", std::move(imag)}};
  if (!config_echo.empty()) root["config"] = json::parse(config_echo);
  atomic_write_text(path, root.dump(2) + "\n");
}

void write_wigner_csv(const std::string& path, const WignerGrid& grid) {
  std::ostringstream out;
  out << "x,p,w\n";
  char line[128];
  for (size_t i = 0; i < grid.xs.size(); ++i) {
    for (size_t j = 0; j < grid.ps.size(); ++j) {
      std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", grid.xs[i],
                    grid.ps[j],
                    grid.values(static_cast<int>(i), static_cast<int>(j)));
      out << line;
    }
  }
  atomic_write_text(path, out.str());
}

}  // namespace qpg
