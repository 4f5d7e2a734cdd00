#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ecofusion/boxops.hpp"
#include "ecofusion/core.hpp"
#include "ecofusion/energymodel.hpp"
#include "ecofusion/lossmodel.hpp"
#include "ecofusion/optimizer.hpp"

namespace ecofusion {

class GatePolicy;

inline constexpr double kFrameSize = 1000.0;

struct Scene {
  int id = 0;
  Context context;
  std::vector<GroundTruthObject> objects;
  std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Deterministic randomness

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of an independent random stream keyed by (scene seed, branch id, counter).
std::uint64_t stream_seed(std::uint64_t scene_seed, std::string_view branch_id, std::uint64_t counter);

/// Seed of scene `index` under a master seed.
std::uint64_t scene_seed(std::uint64_t master_seed, std::uint64_t index);

// ---------------------------------------------------------------------------
// Branch quality

struct BranchQuality {
  double miss_rate = 0.0;
  double fp_rate = 0.0;
  double box_noise_sigma = 0.0;
  double confidence_alpha = 1.0;  // beta == 0 means confidence is always 1
  double confidence_beta = 1.0;

  void validate() const;
};

/// Per-(context label, branch) detector behaviour.
///
/// Text format, one whitespace-separated row per entry ('#' comments):
///
///     label branch miss_rate fp_rate box_noise_sigma confidence_alpha confidence_beta
class QualityMatrix {
 public:
  void set(ContextLabel label, std::string branch, BranchQuality q);
  const BranchQuality& at(ContextLabel label, std::string_view branch) const;
  bool contains(ContextLabel label, std::string_view branch) const;

  /// Requires an entry for every label x branch pair.
  void require_complete(std::span<const ContextLabel> labels, std::span<const Branch> branches) const;

  static QualityMatrix parse(std::string_view text, const std::string& origin = "<memory>");
  static QualityMatrix load(const std::filesystem::path& path);
  std::string serialize() const;

 private:
  std::map<std::pair<ContextLabel, std::string>, BranchQuality, std::less<>> entries_;
};

// ---------------------------------------------------------------------------
// Scenes

struct ObjectCountRange {
  int min = 3;
  int max = 8;
};

/// Stem stub: a one-hot context encoding plus small seeded noise.
std::vector<double> extract_context_features(ContextLabel label, std::uint64_t seed);

/// Uniform object count in the range, uniform classes, non-degenerate boxes inside the
/// 1000x1000 frame. Deterministic in the seed.
Scene generate_scene(ContextLabel label, ObjectCountRange range, std::uint64_t seed, int id = 0);

struct BenchmarkSpec {
  std::vector<ContextLabel> labels;
  int scenes_per_label = 100;
  ObjectCountRange objects;
  std::uint64_t seed = 1;
};

/// Scenes ordered by label, ids 0..n-1, seeds derived from the master seed and id.
std::vector<Scene> generate_benchmark(const BenchmarkSpec& spec);

/// Scene set text format:
///
///     scene <id> <label> <seed> <object count>
///     feature <v0> ... <v7>
///     object <class id> <x1> <y1> <x2> <y2>      (object count lines)
std::string serialize_scenes(std::span<const Scene> scenes);
std::vector<Scene> parse_scenes(std::string_view text, const std::string& origin = "<memory>");

// ---------------------------------------------------------------------------
// Branch simulation

/// Stochastic stand-in for a trained detector branch. All draws derive from
/// (scene.seed, branch.id, object index), so calls are repeatable and branches independent.
std::vector<Detection> simulate_branch(const Branch& branch, const Scene& scene,
                                       const QualityMatrix& quality);

/// Detections of every declared branch for one scene, indexed like space.branches().
using BranchOutputs = std::vector<std::vector<Detection>>;

class Simulator {
 public:
  Simulator(ConfigurationSpace space, QualityMatrix quality, FusionParams fusion = {},
            LossWeights loss = {});

  const ConfigurationSpace& space() const { return space_; }
  const QualityMatrix& quality() const { return quality_; }
  const LossWeights& loss_weights() const { return loss_; }

  BranchOutputs simulate_all(const Scene& scene) const;

  /// Runs cfg's branches: pass-through for one branch, weighted box fusion otherwise.
  std::vector<Detection> execute(const Configuration& cfg, const BranchOutputs& outputs) const;
  std::vector<Detection> execute(const Configuration& cfg, const Scene& scene) const;

  /// Per-scene mean detection loss of cfg's fused output.
  double realized_loss(const Configuration& cfg, const Scene& scene, const BranchOutputs& outputs) const;

 private:
  ConfigurationSpace space_;
  QualityMatrix quality_;
  FusionParams fusion_;
  LossWeights loss_;
};

// ---------------------------------------------------------------------------
// End-to-end pipeline

struct PipelineResult {
  int scene_id = 0;
  ContextLabel label = ContextLabel::city;
  Configuration chosen;
  SelectionResult selection;
  std::vector<Detection> detections;
  double estimated_loss = 0.0;  // gate estimate of the chosen configuration
  double realized_loss = 0.0;
  double energy_j = 0.0;
  double latency_s = 0.0;
};

/// Per-configuration compute energies of a space, in index order.
std::vector<double> space_energies(const ConfigurationSpace& space, const EnergyProfile& profile);

/// Stems -> gate -> candidate filter -> joint optimisation -> branch execution -> fusion.
PipelineResult run_pipeline(const Scene& scene, const GatePolicy& gate, const Simulator& sim,
                            const EnergyProfile& profile, const OptimizerParams& params);

/// Same as run_pipeline for several λ_E values, sharing the gate estimate and branch runs.
std::vector<PipelineResult> run_pipeline_sweep(const Scene& scene, const GatePolicy& gate,
                                               const Simulator& sim, const EnergyProfile& profile,
                                               double gamma, std::span<const double> lambdas,
                                               double energy_scale = 1.0);

/// Always executes one fixed configuration (baselines: single branch, early, late fusion).
PipelineResult run_static(const Scene& scene, const Configuration& cfg, const Simulator& sim,
                          const EnergyProfile& profile);

/// Calls fn(i) for i in [0, n) on up to `workers` threads (0 = hardware concurrency).
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace ecofusion
