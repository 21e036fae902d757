#include "loopsoup/loopmeasure.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "loopsoup/csv.hpp"
#include "loopsoup/stats.hpp"

namespace loopsoup {

namespace {

using json = nlohmann::json;

constexpr double kKeyTol = 1e-9;

bool close(double a, double b) { return std::abs(a - b) <= kKeyTol * std::max({1.0, a, b}); }

struct CountSpec {
  enum class Kind { Point, Ball, Pair, Exclusive, Pattern };
  Kind kind = Kind::Point;
  int i = -1, j = -1;
  std::uint32_t diam_min_index = 0;            // diam_index >= this
  std::uint32_t diam_max_index = 0xffffffffu;  // diam_index <= this
  std::uint8_t ball_min_class = 0;
  std::uint64_t pattern_mask = 0;
  std::uint64_t pattern_scope = 0;
};

// Runs n_rep independent replica soups and turns per-spec counts into mass
// estimates: mean(count)/lambda with the larger of the Poisson and the
// replica-empirical standard error.
std::vector<Estimate> run_counting(const Domain& domain, const SamplerOptions& opt,
                                   const QuerySet& queries, const std::vector<CountSpec>& specs,
                                   const EstimatorBudget& budget, const Seeder& seed) {
  LoopSampler sampler(domain, opt);
  std::vector<MomentAccumulator> acc(specs.size());
  std::vector<double> counts(specs.size(), 0.0);
  for (int rep = 0; rep < budget.n_rep; ++rep) {
    std::fill(counts.begin(), counts.end(), 0.0);
    sampler.run(budget.lambda_probe, seed.child(static_cast<std::uint64_t>(rep)), queries,
                [&](const LoopReport& r) {
                  for (std::size_t s = 0; s < specs.size(); ++s) {
                    const CountSpec& cs = specs[s];
                    if (r.diam_index < cs.diam_min_index || r.diam_index > cs.diam_max_index)
                      continue;
                    switch (cs.kind) {
                      case CountSpec::Kind::Point:
                        if (r.coverage >> cs.i & 1) counts[s] += 1.0;
                        break;
                      case CountSpec::Kind::Ball:
                        if ((r.coverage >> cs.i & 1) && r.ball_class[cs.i] >= cs.ball_min_class)
                          counts[s] += 1.0;
                        break;
                      case CountSpec::Kind::Pair:
                        if ((r.coverage >> cs.i & 1) && (r.coverage >> cs.j & 1)) counts[s] += 1.0;
                        break;
                      case CountSpec::Kind::Exclusive:
                        if ((r.coverage >> cs.i & 1) && !(r.coverage >> cs.j & 1))
                          counts[s] += 1.0;
                        break;
                      case CountSpec::Kind::Pattern:
                        if ((r.coverage & cs.pattern_scope) == cs.pattern_mask) counts[s] += 1.0;
                        break;
                    }
                  }
                });
    for (std::size_t s = 0; s < specs.size(); ++s) acc[s].add(counts[s]);
  }
  std::vector<Estimate> out(specs.size());
  const double lam = budget.lambda_probe;
  const double n = static_cast<double>(budget.n_rep);
  for (std::size_t s = 0; s < specs.size(); ++s) {
    const double mean_count = acc[s].mean();
    const double poisson_se = std::sqrt(std::max(mean_count, 0.0) / n) / lam;
    const double empirical_se = acc[s].stderr_mean() / lam;
    out[s] = Estimate{mean_count / lam, std::max(poisson_se, empirical_se),
                      static_cast<std::uint64_t>(budget.n_rep)};
  }
  return out;
}

// diam_index convention: number of thresholds <= diameter, so "diameter >=
// T[k]" is diam_index >= k+1 and "diameter < T[k]" is diam_index <= k.
std::uint32_t min_index_for(const std::vector<double>& thresholds, double delta) {
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    if (close(thresholds[k], delta)) return static_cast<std::uint32_t>(k + 1);
  }
  throw ConfigError("internal: threshold not registered");
}

std::string timestamp_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

double alpha_exact_annulus(double delta, double R) {
  if (delta <= 0.0 || R <= 0.0 || delta > R)
    throw ConfigError("annulus mass needs 0 < delta <= R");
  return std::log(R / delta) / 5.0;
}

double alpha_upper_bound(const Domain& domain, double delta) {
  if (delta <= 0.0) throw ConfigError("delta must be positive");
  if (delta >= domain.diameter()) return 0.0;
  return std::log(domain.diameter() / delta) / 5.0;
}

Estimate estimate_alpha(const Domain& domain, Point z, double delta, std::optional<double> R,
                        const EstimatorBudget& budget, const Seeder& seed, SamplerOptions opt) {
  if (!domain.contains(z)) throw DomainError("evaluation point outside domain");
  if (delta >= domain.diameter()) return Estimate::exact(0.0);
  opt.delta0 = delta;
  QuerySet q;
  q.points = {z};
  q.diam_thresholds = {delta};
  if (R) q.diam_thresholds.push_back(*R);
  CountSpec cs;
  cs.kind = CountSpec::Kind::Point;
  cs.i = 0;
  cs.diam_min_index = 1;
  if (R) cs.diam_max_index = 1;  // diameter < R
  return run_counting(domain, opt, q, {cs}, budget, seed)[0];
}

Estimate estimate_alpha_pair(const Domain& domain, Point z, Point w,
                             const EstimatorBudget& budget, const Seeder& seed,
                             SamplerOptions opt) {
  if (!domain.contains(z) || !domain.contains(w)) throw DomainError("point outside domain");
  const double sep = dist(z, w);
  if (sep <= 0.0) throw DomainError("pair mass diverges on the diagonal");
  if (sep >= domain.diameter()) return Estimate::exact(0.0);
  opt.delta0 = sep;
  QuerySet q;
  q.points = {z, w};
  CountSpec cs;
  cs.kind = CountSpec::Kind::Pair;
  cs.i = 0;
  cs.j = 1;
  return run_counting(domain, opt, q, {cs}, budget, seed)[0];
}

// ---------------------------------------------------------------------------
// Builder
// ---------------------------------------------------------------------------

AlphaTableBuilder::AlphaTableBuilder(const Domain& domain, SamplerOptions base_opt)
    : domain_(domain), base_opt_(base_opt) {}

int AlphaTableBuilder::add_point(Point z) {
  if (!domain_.contains(z)) throw DomainError("table point outside domain");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (dist(points_[i], z) < kKeyTol) return static_cast<int>(i);
  }
  points_.push_back(z);
  want_anchor_.push_back(false);
  want_point_.emplace_back();
  want_ball_.emplace_back();
  if (points_.size() > 64) throw ConfigError("alpha table supports at most 64 points");
  return static_cast<int>(points_.size()) - 1;
}

void AlphaTableBuilder::request_anchor(int i) { want_anchor_[static_cast<std::size_t>(i)] = true; }
void AlphaTableBuilder::request_point(int i, double delta) {
  want_point_[static_cast<std::size_t>(i)].push_back(delta);
}
void AlphaTableBuilder::request_ball(int i, double delta) {
  want_ball_[static_cast<std::size_t>(i)].push_back(delta);
}
void AlphaTableBuilder::request_pair(int i, int j) { want_pair_.emplace_back(i, j, 0.0); }
void AlphaTableBuilder::request_pair_cutoff(int i, int j, double delta) {
  want_pair_.emplace_back(i, j, delta);
}
void AlphaTableBuilder::request_exclusive(int i, int j, double delta) {
  want_excl_.emplace_back(i, j, delta);
}
int AlphaTableBuilder::add_pattern_group(const std::vector<int>& pts) {
  if (pts.size() > 6) throw ConfigError("pattern groups support n <= 6");
  want_groups_.push_back(pts);
  return static_cast<int>(want_groups_.size()) - 1;
}

std::uint64_t AlphaTableBuilder::config_hash(const EstimatorBudget& budget,
                                             std::uint64_t master_seed) const {
  // FNV-1a over a canonical description.
  std::string desc = domain_.describe();
  auto add_d = [&desc](double v) { desc += "," + fmt_double(v); };
  for (const Point& p : points_) {
    add_d(p.real());
    add_d(p.imag());
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    desc += want_anchor_[i] ? "|A" : "|.";
    for (double d : want_point_[i]) add_d(d);
    desc += ";";
    for (double d : want_ball_[i]) add_d(d);
  }
  for (auto& [i, j, d] : want_pair_) {
    desc += "|P" + std::to_string(i) + ":" + std::to_string(j);
    add_d(d);
  }
  for (auto& [i, j, d] : want_excl_) {
    desc += "|X" + std::to_string(i) + ":" + std::to_string(j);
    add_d(d);
  }
  for (auto& g : want_groups_) {
    desc += "|G";
    for (int p : g) desc += std::to_string(p) + ".";
  }
  add_d(budget.lambda_probe);
  desc += "|n" + std::to_string(budget.n_rep);
  desc += "|s" + std::to_string(master_seed);
  desc += "|d0" + fmt_double(base_opt_.delta0) + "|v1";
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : desc) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

AlphaTable AlphaTableBuilder::build(const EstimatorBudget& budget, const Seeder& seed) const {
  AlphaTable t;
  t.points_ = points_;
  t.anchors_.assign(points_.size(), Estimate{});
  t.anchor_cutoffs_.assign(points_.size(), 0.0);
  t.point_entries_.assign(points_.size(), {});
  t.ball_entries_.assign(points_.size(), {});

  // One batch: the UV cutoff is the smallest any request needs.
  double delta0 = domain_.diameter();
  std::vector<double> thresholds;
  std::vector<double> ball_thresholds;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double dz = domain_.boundary_distance(points_[i]);
    t.anchor_cutoffs_[i] = dz;
    if (want_anchor_[i]) {
      delta0 = std::min(delta0, dz);
      thresholds.push_back(dz);
    }
    for (double d : want_point_[i]) {
      delta0 = std::min(delta0, d);
      thresholds.push_back(d);
    }
    for (double d : want_ball_[i]) {
      delta0 = std::min(delta0, d);
      ball_thresholds.push_back(d);
    }
  }
  for (auto& [i, j, d] : want_pair_) {
    const double sep = dist(points_[static_cast<std::size_t>(i)], points_[static_cast<std::size_t>(j)]);
    delta0 = std::min(delta0, std::max(sep, d));
    if (d > 0.0) thresholds.push_back(d);
  }
  for (auto& [i, j, d] : want_excl_) {
    delta0 = std::min(delta0, d);
    thresholds.push_back(d);
  }
  std::vector<double> group_scales;
  for (auto& g : want_groups_) {
    double m = domain_.diameter();
    for (std::size_t a = 0; a < g.size(); ++a) {
      m = std::min(m, domain_.boundary_distance(points_[static_cast<std::size_t>(g[a])]));
      for (std::size_t b = a + 1; b < g.size(); ++b) {
        m = std::min(m, dist(points_[static_cast<std::size_t>(g[a])],
                             points_[static_cast<std::size_t>(g[b])]));
      }
    }
    group_scales.push_back(m);
    delta0 = std::min(delta0, m);
    thresholds.push_back(m);
  }

  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end(),
                               [](double a, double b) { return close(a, b); }),
                   thresholds.end());
  std::sort(ball_thresholds.begin(), ball_thresholds.end());
  ball_thresholds.erase(std::unique(ball_thresholds.begin(), ball_thresholds.end(),
                                    [](double a, double b) { return close(a, b); }),
                        ball_thresholds.end());

  QuerySet q;
  q.points = points_;
  q.diam_thresholds = thresholds;
  q.ball_thresholds = ball_thresholds;
  q.roi_cull = true;

  std::vector<CountSpec> specs;
  // Registration order fixes the unpack order below.
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (want_anchor_[i]) {
      CountSpec cs;
      cs.kind = CountSpec::Kind::Point;
      cs.i = static_cast<int>(i);
      cs.diam_min_index = min_index_for(thresholds, t.anchor_cutoffs_[i]);
      specs.push_back(cs);
    }
    for (double d : want_point_[i]) {
      CountSpec cs;
      cs.kind = CountSpec::Kind::Point;
      cs.i = static_cast<int>(i);
      cs.diam_min_index = min_index_for(thresholds, d);
      specs.push_back(cs);
    }
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    for (double d : want_ball_[i]) {
      CountSpec cs;
      cs.kind = CountSpec::Kind::Ball;
      cs.i = static_cast<int>(i);
      std::uint8_t cls = 0;
      for (std::size_t k = 0; k < ball_thresholds.size(); ++k) {
        if (close(ball_thresholds[k], d)) cls = static_cast<std::uint8_t>(k + 1);
      }
      cs.ball_min_class = cls;
      specs.push_back(cs);
    }
  }
  for (auto& [i, j, d] : want_pair_) {
    CountSpec cs;
    cs.kind = CountSpec::Kind::Pair;
    cs.i = i;
    cs.j = j;
    if (d > 0.0) cs.diam_min_index = min_index_for(thresholds, d);
    specs.push_back(cs);
  }
  for (auto& [i, j, d] : want_excl_) {
    CountSpec cs;
    cs.kind = CountSpec::Kind::Exclusive;
    cs.i = i;
    cs.j = j;
    cs.diam_min_index = min_index_for(thresholds, d);
    specs.push_back(cs);
  }
  // Pattern groups: every nonempty subset; singletons carry the scale cutoff.
  std::vector<std::vector<std::pair<std::uint64_t, std::size_t>>> group_slots;
  for (std::size_t g = 0; g < want_groups_.size(); ++g) {
    const auto& pts = want_groups_[g];
    std::uint64_t scope = 0;
    for (int p : pts) scope |= (std::uint64_t{1} << p);
    std::vector<std::pair<std::uint64_t, std::size_t>> slots;
    const std::uint64_t n_masks = std::uint64_t{1} << pts.size();
    for (std::uint64_t m = 1; m < n_masks; ++m) {
      std::uint64_t mask = 0;
      for (std::size_t b = 0; b < pts.size(); ++b) {
        if (m >> b & 1) mask |= (std::uint64_t{1} << pts[b]);
      }
      CountSpec cs;
      cs.kind = CountSpec::Kind::Pattern;
      cs.pattern_scope = scope;
      cs.pattern_mask = mask;
      if (std::popcount(m) == 1) cs.diam_min_index = min_index_for(thresholds, group_scales[g]);
      slots.emplace_back(m, specs.size());
      specs.push_back(cs);
    }
    group_slots.push_back(std::move(slots));
  }

  SamplerOptions opt = base_opt_;
  opt.delta0 = delta0;
  const auto est = run_counting(domain_, opt, q, specs, budget, seed);

  // Unpack in the exact order the specs were registered.
  {
    std::size_t s = 0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (want_anchor_[i]) t.anchors_[i] = est[s++];
      for (double d : want_point_[i]) t.point_entries_[i].push_back({d, est[s++]});
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
      for (double d : want_ball_[i]) t.ball_entries_[i].push_back({d, est[s++]});
    }
    for (auto& [i, j, d] : want_pair_) {
      t.pair_entries_[{std::min(i, j), std::max(i, j)}].push_back({d, est[s++]});
    }
    for (auto& [i, j, d] : want_excl_) {
      t.excl_entries_[{i, j}].push_back({d, est[s++]});
    }
    for (std::size_t g = 0; g < want_groups_.size(); ++g) {
      PatternGroup pg;
      pg.point_idx = want_groups_[g];
      pg.scale = group_scales[g];
      for (auto& [m, idx] : group_slots[g]) pg.entries[m] = est[idx];
      t.groups_.push_back(std::move(pg));
    }
  }

  t.meta_.domain = domain_.describe();
  t.meta_.lambda_probe = budget.lambda_probe;
  t.meta_.n_rep = budget.n_rep;
  t.meta_.master_seed = seed.key();
  t.meta_.delta0 = delta0;
  t.meta_.eps_mass = opt.eps_mass;
  t.meta_.created_at = timestamp_now();
  t.meta_.config_hash = config_hash(budget, seed.key());
  return t;
}

// ---------------------------------------------------------------------------
// AlphaTable lookups
// ---------------------------------------------------------------------------

int AlphaTable::find_point(Point z) const {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (dist(points_[i], z) < kKeyTol) return static_cast<int>(i);
  }
  return -1;
}

const Estimate* AlphaTable::find(const std::vector<Keyed>& v, double delta) {
  for (const auto& k : v) {
    if (close(k.delta, delta)) return &k.est;
  }
  return nullptr;
}

Estimate AlphaTable::anchor(int i) const {
  const auto& e = anchors_.at(static_cast<std::size_t>(i));
  if (e.n == 0 && e.value == 0.0 && e.stderr_ == 0.0)
    throw TableError("missing anchor entry");
  return e;
}

double AlphaTable::anchor_cutoff(int i) const { return anchor_cutoffs_.at(static_cast<std::size_t>(i)); }

Estimate AlphaTable::point_mass(int i, double delta) const {
  if (delta <= 0.0) throw TableError("alpha_delta(z) needs delta > 0");
  const double a = anchor_cutoffs_.at(static_cast<std::size_t>(i));
  if (delta <= a * (1.0 + kKeyTol)) {
    // Exact split below the boundary distance.
    const Estimate base = anchor(i);
    return base + std::log(a / delta) / 5.0;
  }
  if (const Estimate* e = find(point_entries_[static_cast<std::size_t>(i)], delta)) return *e;
  throw TableError("missing alpha_delta(z) entry at delta=" + fmt_double(delta));
}

Estimate AlphaTable::ball_mass(int i, double delta) const {
  if (const Estimate* e = find(ball_entries_.at(static_cast<std::size_t>(i)), delta)) return *e;
  throw TableError("missing ball entry at delta=" + fmt_double(delta));
}

Estimate AlphaTable::pair_mass(int i, int j) const { return pair_mass_cutoff(i, j, 0.0); }

Estimate AlphaTable::pair_mass_cutoff(int i, int j, double delta) const {
  const double sep = dist(points_.at(static_cast<std::size_t>(i)), points_.at(static_cast<std::size_t>(j)));
  if (delta <= sep) delta = 0.0;  // the natural cutoff already dominates
  const auto it = pair_entries_.find({std::min(i, j), std::max(i, j)});
  if (it != pair_entries_.end()) {
    if (const Estimate* e = find(it->second, delta)) return *e;
  }
  throw TableError("missing pair entry");
}

Estimate AlphaTable::exclusive_mass(int i, int j, double delta) const {
  const auto it = excl_entries_.find({i, j});
  if (it != excl_entries_.end()) {
    if (const Estimate* e = find(it->second, delta)) return *e;
  }
  throw TableError("missing exclusive entry");
}

const PatternGroup& AlphaTable::pattern_group(int id) const {
  return groups_.at(static_cast<std::size_t>(id));
}

std::vector<AlphaTable::SandwichRow> AlphaTable::check_sandwich(double n_sigma) const {
  std::vector<SandwichRow> rows;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    for (const auto& k : ball_entries_[i]) {
      const Estimate* half = find(ball_entries_[i], k.delta / 2.0);
      if (!half) continue;
      Estimate mid;
      try {
        mid = point_mass(static_cast<int>(i), k.delta);
      } catch (const TableError&) {
        continue;
      }
      SandwichRow r;
      r.point = static_cast<int>(i);
      r.delta = k.delta;
      r.lower = k.est.value;
      r.mid = mid.value;
      r.upper = half->value;
      const double se_lo = std::hypot(k.est.stderr_, mid.stderr_);
      const double se_up = std::hypot(half->stderr_, mid.stderr_);
      r.slack_lower = se_lo > 0.0 ? (r.mid - r.lower) / se_lo : (r.mid >= r.lower ? 1e9 : -1e9);
      r.slack_upper = se_up > 0.0 ? (r.upper - r.mid) / se_up : (r.upper >= r.mid ? 1e9 : -1e9);
      r.ok = r.slack_lower >= -n_sigma && r.slack_upper >= -n_sigma;
      rows.push_back(r);
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

void AlphaTable::save(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    json meta;
    meta["schema_version"] = meta_.schema_version;
    meta["domain"] = meta_.domain;
    meta["lambda_probe"] = meta_.lambda_probe;
    meta["n_rep"] = meta_.n_rep;
    meta["master_seed"] = meta_.master_seed;
    meta["delta0"] = meta_.delta0;
    meta["eps_mass"] = meta_.eps_mass;
    meta["created_at"] = meta_.created_at;
    meta["config_hash"] = meta_.config_hash;
    json pts = json::array();
    for (const Point& p : points_) pts.push_back({p.real(), p.imag()});
    meta["points"] = pts;
    json anchors = json::array();
    for (std::size_t i = 0; i < points_.size(); ++i) {
      anchors.push_back({{"delta", anchor_cutoffs_[i]},
                         {"value", anchors_[i].value},
                         {"stderr", anchors_[i].stderr_},
                         {"n", anchors_[i].n}});
    }
    meta["anchors"] = anchors;
    json groups = json::array();
    for (const auto& g : groups_) {
      json jg;
      jg["points"] = g.point_idx;
      jg["scale"] = g.scale;
      groups.push_back(jg);
    }
    meta["groups"] = groups;
    std::ofstream out(dir + "/alpha_meta.json");
    out << meta.dump(2) << '\n';
  }
  {
    CsvWriter w(dir + "/alpha_point.csv", "z_re,z_im,delta,value,stderr,n");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      for (const auto& k : point_entries_[i]) {
        w.row(points_[i].real(), points_[i].imag(), k.delta, k.est.value, k.est.stderr_, k.est.n);
      }
    }
  }
  {
    CsvWriter w(dir + "/alpha_ball.csv", "z_re,z_im,delta,value,stderr,n");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      for (const auto& k : ball_entries_[i]) {
        w.row(points_[i].real(), points_[i].imag(), k.delta, k.est.value, k.est.stderr_, k.est.n);
      }
    }
  }
  {
    CsvWriter w(dir + "/alpha_pair.csv", "z_re,z_im,w_re,w_im,delta,value,stderr,n");
    for (const auto& [ij, entries] : pair_entries_) {
      for (const auto& k : entries) {
        const Point a = points_[static_cast<std::size_t>(ij.first)];
        const Point b = points_[static_cast<std::size_t>(ij.second)];
        w.row(a.real(), a.imag(), b.real(), b.imag(), k.delta, k.est.value, k.est.stderr_, k.est.n);
      }
    }
  }
  {
    CsvWriter w(dir + "/alpha_excl.csv", "z_re,z_im,w_re,w_im,delta,value,stderr,n");
    for (const auto& [ij, entries] : excl_entries_) {
      for (const auto& k : entries) {
        const Point a = points_[static_cast<std::size_t>(ij.first)];
        const Point b = points_[static_cast<std::size_t>(ij.second)];
        w.row(a.real(), a.imag(), b.real(), b.imag(), k.delta, k.est.value, k.est.stderr_, k.est.n);
      }
    }
  }
  {
    CsvWriter w(dir + "/alpha_pattern.csv", "group,mask,delta,value,stderr,n");
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      for (const auto& [mask, e] : groups_[g].entries) {
        const double cutoff = std::popcount(mask) == 1 ? groups_[g].scale : 0.0;
        w.row(static_cast<std::uint64_t>(g), mask, cutoff, e.value, e.stderr_, e.n);
      }
    }
  }
}

AlphaTable AlphaTable::load(const std::string& dir) {
  std::ifstream in(dir + "/alpha_meta.json");
  if (!in) throw TableError("no alpha table at " + dir);
  json meta = json::parse(in);
  AlphaTable t;
  t.meta_.schema_version = meta.at("schema_version").get<int>();
  if (t.meta_.schema_version != 1) throw TableError("unsupported alpha table schema");
  t.meta_.domain = meta.at("domain").get<std::string>();
  t.meta_.lambda_probe = meta.at("lambda_probe").get<double>();
  t.meta_.n_rep = meta.at("n_rep").get<int>();
  t.meta_.master_seed = meta.at("master_seed").get<std::uint64_t>();
  t.meta_.delta0 = meta.at("delta0").get<double>();
  t.meta_.eps_mass = meta.at("eps_mass").get<double>();
  t.meta_.created_at = meta.at("created_at").get<std::string>();
  t.meta_.config_hash = meta.at("config_hash").get<std::uint64_t>();
  for (const auto& p : meta.at("points")) {
    t.points_.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  for (const auto& a : meta.at("anchors")) {
    t.anchor_cutoffs_.push_back(a.at("delta").get<double>());
    t.anchors_.push_back(Estimate{a.at("value").get<double>(), a.at("stderr").get<double>(),
                                  a.at("n").get<std::uint64_t>()});
  }
  t.point_entries_.assign(t.points_.size(), {});
  t.ball_entries_.assign(t.points_.size(), {});
  for (const auto& jg : meta.at("groups")) {
    PatternGroup g;
    g.point_idx = jg.at("points").get<std::vector<int>>();
    g.scale = jg.at("scale").get<double>();
    t.groups_.push_back(std::move(g));
  }
  auto parse_est = [](const std::vector<std::string>& f, std::size_t off) {
    return Estimate{std::stod(f[off]), std::stod(f[off + 1]),
                    static_cast<std::uint64_t>(std::stoull(f[off + 2]))};
  };
  for (auto& f : read_csv(dir + "/alpha_point.csv")) {
    if (f[0] == "z_re") continue;
    const int i = t.find_point(Point(std::stod(f[0]), std::stod(f[1])));
    t.point_entries_[static_cast<std::size_t>(i)].push_back({std::stod(f[2]), parse_est(f, 3)});
  }
  for (auto& f : read_csv(dir + "/alpha_ball.csv")) {
    if (f[0] == "z_re") continue;
    const int i = t.find_point(Point(std::stod(f[0]), std::stod(f[1])));
    t.ball_entries_[static_cast<std::size_t>(i)].push_back({std::stod(f[2]), parse_est(f, 3)});
  }
  for (auto& f : read_csv(dir + "/alpha_pair.csv")) {
    if (f[0] == "z_re") continue;
    const int i = t.find_point(Point(std::stod(f[0]), std::stod(f[1])));
    const int j = t.find_point(Point(std::stod(f[2]), std::stod(f[3])));
    t.pair_entries_[{std::min(i, j), std::max(i, j)}].push_back({std::stod(f[4]), parse_est(f, 5)});
  }
  for (auto& f : read_csv(dir + "/alpha_excl.csv")) {
    if (f[0] == "z_re") continue;
    const int i = t.find_point(Point(std::stod(f[0]), std::stod(f[1])));
    const int j = t.find_point(Point(std::stod(f[2]), std::stod(f[3])));
    t.excl_entries_[{i, j}].push_back({std::stod(f[4]), parse_est(f, 5)});
  }
  for (auto& f : read_csv(dir + "/alpha_pattern.csv")) {
    if (f[0] == "group") continue;
    const std::size_t g = std::stoull(f[0]);
    t.groups_.at(g).entries[std::stoull(f[1])] = parse_est(f, 3);
  }
  return t;
}

std::optional<AlphaTable> AlphaTable::try_load(const std::string& dir, std::uint64_t config_hash) {
  try {
    AlphaTable t = load(dir);
    if (t.meta_.config_hash != config_hash) return std::nullopt;
    return t;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

AlphaTable build_alpha_table(const Domain& domain, const std::vector<Point>& grid,
                             const std::vector<double>& delta_list, const EstimatorBudget& budget,
                             const Seeder& seed, const std::string& dir, SamplerOptions opt) {
  AlphaTableBuilder b(domain, opt);
  for (const Point& z : grid) {
    const int i = b.add_point(z);
    b.request_anchor(i);
    const double dz = domain.boundary_distance(z);
    for (double d : delta_list) {
      if (d > dz) b.request_point(i, d);  // below dz the anchor split covers it
      b.request_ball(i, d);
      b.request_ball(i, d / 2.0);
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      b.request_pair(static_cast<int>(i), static_cast<int>(j));
    }
  }
  const std::uint64_t hash = b.config_hash(budget, seed.key());
  if (auto cached = AlphaTable::try_load(dir, hash)) return std::move(*cached);
  AlphaTable t = b.build(budget, seed);
  t.save(dir);
  return t;
}

}  // namespace loopsoup
