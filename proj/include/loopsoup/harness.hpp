#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "loopsoup/common.hpp"
#include "loopsoup/geometry.hpp"
#include "loopsoup/sampler.hpp"
#include "loopsoup/soup.hpp"

namespace loopsoup {

// One experiment invocation: everything a run needs, deserialized from the
// versioned JSON config. Unspecified fields keep the canonical defaults used
// by the acceptance suite.
struct ExperimentConfig {
  std::string experiment;
  int schema_version = 1;
  std::string domain_kind = "unit_disk";
  Point square_center{};
  double square_side = 2.0;
  double mobius_a_re = 0.0, mobius_a_im = 0.0;

  double lambda = 1.0;
  double beta = 1.0;
  double xi = 1.0;
  double delta = 0.1;
  std::optional<double> ir_radius;
  double eps_mass = 1e-3;
  int max_steps = 16384;

  double quad_cell = 0.25;
  int n_rep = 400;
  double lambda_probe = 4.0;
  int table_n_rep = 1200;
  std::uint64_t master_seed = 20260809;
  std::string out_dir = "out";
  std::string table_dir;  // defaults to <out_dir>/alpha_table

  // Budget multiplier: scale every replica count (smoke configs use < 1).
  double budget_scale = 1.0;

  static ExperimentConfig from_json_file(const std::string& path);
  static ExperimentConfig from_json_text(const std::string& text);
  std::string to_json() const;

  Domain domain() const;
  int scaled(int reps) const {
    return std::max(8, static_cast<int>(reps * budget_scale));
  }
};

struct CriterionResult {
  std::string id;
  bool pass = false;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct RunManifest {
  std::string experiment;
  std::uint64_t config_hash = 0;
  std::string code_version;
  std::string started_at;
  std::string finished_at;
  std::vector<CriterionResult> criteria;

  bool all_pass() const;
  void save(const std::string& path) const;
};

// Executes the named experiment, writes CSV data plus the JSON manifest
// under config.out_dir, and returns the manifest. Stochastic outputs are a
// pure function of (config, master_seed).
RunManifest run_experiment(const ExperimentConfig& config);

std::vector<std::string> experiment_names();

// Runs every acceptance experiment; returns manifests in criterion order.
std::vector<RunManifest> run_suite(const ExperimentConfig& base);

}  // namespace loopsoup
