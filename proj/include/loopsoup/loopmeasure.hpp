#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "loopsoup/common.hpp"
#include "loopsoup/geometry.hpp"
#include "loopsoup/sampler.hpp"

namespace loopsoup {

// Exact annulus mass: alpha_{delta,R}(z) = (1/5) log(R/delta) whenever
// B(z,R) lies inside the domain (the caller asserts that inclusion).
double alpha_exact_annulus(double delta, double R);

// Uniform bound (1/5) log(d(D)/delta); 0 once delta >= d(D).
double alpha_upper_bound(const Domain& domain, double delta);

struct EstimatorBudget {
  double lambda_probe = 4.0;
  int n_rep = 400;
};

// Monte Carlo mass of loops with diameter >= delta (and < R when given)
// covering z: mean soup count / lambda_probe, Poisson-vs-empirical stderr.
Estimate estimate_alpha(const Domain& domain, Point z, double delta, std::optional<double> R,
                        const EstimatorBudget& budget, const Seeder& seed,
                        SamplerOptions opt = {});

// Mass of loops covering both z and w (diameter >= |z-w| automatically).
Estimate estimate_alpha_pair(const Domain& domain, Point z, Point w,
                             const EstimatorBudget& budget, const Seeder& seed,
                             SamplerOptions opt = {});

// ---------------------------------------------------------------------------
// AlphaTable: persisted estimates of loop-measure masses on a registered
// point set. Entries at cutoffs below a point's boundary distance are derived
// from the anchor via the exact split
//   alpha_delta(z) = (1/5) log(d_z/delta) + alpha_{d_z}(z),  delta <= d_z,
// so only anchors, pairs, exclusives, balls and patterns are sampled.
// ---------------------------------------------------------------------------

struct PatternGroup {
  std::vector<int> point_idx;  // indices into the table point list
  double scale = 0.0;          // m: min(pairwise distance, boundary distance)
  // mask over group positions -> mass of loops covering exactly that subset
  // (cutoff `scale` for singletons, natural cutoff otherwise)
  std::map<std::uint64_t, Estimate> entries;
};

class AlphaTable {
 public:
  struct Meta {
    std::string domain;
    double lambda_probe = 0.0;
    int n_rep = 0;
    std::uint64_t master_seed = 0;
    double delta0 = 0.0;
    double eps_mass = 0.0;
    std::string created_at;
    std::uint64_t config_hash = 0;
    int schema_version = 1;
  };

  const std::vector<Point>& points() const { return points_; }
  int find_point(Point z) const;  // -1 if absent

  Estimate anchor(int i) const;                       // alpha_{d_z}(z_i)
  double anchor_cutoff(int i) const;                  // d_{z_i}
  Estimate point_mass(int i, double delta) const;     // alpha_delta(z_i)
  Estimate ball_mass(int i, double delta) const;      // alpha-bar_delta(z_i)
  Estimate pair_mass(int i, int j) const;             // alpha(z_i, z_j)
  Estimate pair_mass_cutoff(int i, int j, double delta) const;  // alpha_delta(z_i,z_j)
  Estimate exclusive_mass(int i, int j, double delta) const;    // alpha_delta(z_i|z_j)
  const PatternGroup& pattern_group(int id) const;

  const Meta& meta() const { return meta_; }

  struct SandwichRow {
    int point = 0;
    double delta = 0.0;
    double lower = 0.0, mid = 0.0, upper = 0.0;
    double slack_lower = 0.0, slack_upper = 0.0;  // in combined-stderr units
    bool ok = false;
  };
  // alpha-bar_delta <= alpha_delta <= alpha-bar_{delta/2} at every stored
  // (point, delta) with both ball entries present.
  std::vector<SandwichRow> check_sandwich(double n_sigma = 3.0) const;

  void save(const std::string& dir) const;
  static AlphaTable load(const std::string& dir);
  // Load when the stored config hash matches, otherwise empty.
  static std::optional<AlphaTable> try_load(const std::string& dir, std::uint64_t config_hash);

 private:
  friend class AlphaTableBuilder;
  struct Keyed {
    double delta;  // 0 => natural cutoff
    Estimate est;
  };
  static const Estimate* find(const std::vector<Keyed>& v, double delta);

  std::vector<Point> points_;
  std::vector<Estimate> anchors_;
  std::vector<double> anchor_cutoffs_;
  std::vector<std::vector<Keyed>> point_entries_;  // direct, delta > d_z included
  std::vector<std::vector<Keyed>> ball_entries_;
  std::map<std::pair<int, int>, std::vector<Keyed>> pair_entries_;
  std::map<std::pair<int, int>, std::vector<Keyed>> excl_entries_;
  std::vector<PatternGroup> groups_;
  Meta meta_;
};

class AlphaTableBuilder {
 public:
  AlphaTableBuilder(const Domain& domain, SamplerOptions base_opt = {});

  int add_point(Point z);  // registers (idempotent), returns index
  void request_anchor(int i);
  void request_point(int i, double delta);  // direct estimate at delta
  void request_ball(int i, double delta);
  void request_pair(int i, int j);
  void request_pair_cutoff(int i, int j, double delta);
  void request_exclusive(int i, int j, double delta);
  int add_pattern_group(const std::vector<int>& pts);

  AlphaTable build(const EstimatorBudget& budget, const Seeder& seed) const;
  std::uint64_t config_hash(const EstimatorBudget& budget, std::uint64_t master_seed) const;

 private:
  Domain domain_;
  SamplerOptions base_opt_;
  std::vector<Point> points_;
  std::vector<bool> want_anchor_;
  std::vector<std::vector<double>> want_point_;
  std::vector<std::vector<double>> want_ball_;
  std::vector<std::tuple<int, int, double>> want_pair_;  // delta 0 => natural
  std::vector<std::tuple<int, int, double>> want_excl_;
  std::vector<std::vector<int>> want_groups_;
};

// The spec-level convenience: anchors, alpha_delta / ball entries for every
// grid point and delta in delta_list (plus delta/2 balls), and all natural
// pair masses. Persisted under dir; reloaded when the configuration matches.
AlphaTable build_alpha_table(const Domain& domain, const std::vector<Point>& grid,
                             const std::vector<double>& delta_list, const EstimatorBudget& budget,
                             const Seeder& seed, const std::string& dir,
                             SamplerOptions opt = {});

}  // namespace loopsoup
