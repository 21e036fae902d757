#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "loopsoup/geometry.hpp"
#include "loopsoup/loops.hpp"
#include "loopsoup/rng.hpp"

namespace loopsoup {

// Truncation of the sigma-finite loop measure. Candidates are drawn as a
// Poisson process on (root in box) x (duration in [t_min, t_max]) with
// density 1/(2 pi t^2), then thinned by trace-in-domain and diameter >=
// delta0. Every truncation carries an explicit mass-bias bound; the
// configuration is rejected when the total exceeds eps_mass.
struct SamplerOptions {
  double delta0 = 0.1;   // UV diameter cutoff
  double eps_mass = 1e-3;
  std::optional<double> t_min_override;
  std::optional<double> t_max_override;
  int coarse_steps = 16;
  int min_steps = 256;
  int max_steps = 16384;
  double p_tail = 1e-12;  // per early decision
};

struct TruncationBias {
  // Mass of duration < t_min loops wide enough to pass the UV cutoff:
  //   (16 |box| / (pi delta^2)) exp(-delta^2 / (4 t_min)).
  double uv_missed = 0.0;
  // Mass of duration > t_max loops confined to the domain, via the Dirichlet
  // heat-kernel ratio bound on the bounding square of side L:
  //   (4.001 |box| / (pi^2 t_max)) exp(-pi^2 t_max / L^2).
  double ir_missed = 0.0;
  double total() const { return uv_missed + ir_missed; }
};

// Containment / diameter / ball queries answered per retained loop.
// points.size() <= 64 (coverage is a bitset).
struct QuerySet {
  std::vector<Point> points;
  std::vector<double> diam_thresholds;  // sorted ascending; delta0 implied below
  std::vector<double> ball_thresholds;  // sorted ascending; per covered point
  bool keep_paths = false;
  bool roi_cull = true;  // drop loops covering no query point
};

struct LoopReport {
  int sign = +1;
  double duration = 0.0;
  double diameter = 0.0;  // exact iff diameter_exact
  bool diameter_exact = false;
  std::uint32_t diam_index = 0;           // #diam_thresholds <= diameter
  std::uint64_t coverage = 0;             // bit i: hull covers points[i]
  std::span<const std::uint8_t> ball_class;  // #ball_thresholds <= maxdist_i
  const Loop* loop = nullptr;             // when keep_paths
};

using LoopSink = std::function<void(const LoopReport&)>;

class LoopSampler {
 public:
  LoopSampler(const Domain& domain, SamplerOptions opt);

  double candidate_mass() const { return lambda_mass_; }
  const TruncationBias& bias() const { return bias_; }
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  const SamplerOptions& options() const { return opt_; }

  // One soup realization at the given intensity. Deterministic given the
  // seeder; every candidate runs on its own derived stream, so decisions
  // about one candidate never shift another's draws.
  void run(double intensity, const Seeder& seed, const QuerySet& queries,
           const LoopSink& sink) const;

 private:
  Domain domain_;
  SamplerOptions opt_;
  Rect box_;
  double t_min_ = 0.0, t_max_ = 0.0;
  double lambda_mass_ = 0.0;  // candidate mass per unit intensity
  TruncationBias bias_;
};

}  // namespace loopsoup
