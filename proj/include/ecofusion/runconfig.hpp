#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "ecofusion/boxops.hpp"
#include "ecofusion/core.hpp"
#include "ecofusion/energymodel.hpp"
#include "ecofusion/gating.hpp"
#include "ecofusion/kvfile.hpp"
#include "ecofusion/lossmodel.hpp"
#include "ecofusion/optimizer.hpp"
#include "ecofusion/simbench.hpp"

namespace ecofusion {

/// Everything one experiment needs, read from a single declarative file.
///
///     [sensors]    declare = camera_left camera_right lidar radar
///     [branches]   <branch id> = <sensor> [<sensor> ...]
///     [files]      calibration, quality, knowledge, gate_table (optional); relative to
///                  the config file's directory
///     [gates]      policies = loss_oracle table_predictor knowledge
///     [optimizer]  gamma, lambda, lambdas, energy_scale, max_config_size (optional)
///     [compare]    gate, lambdas
///     [loss]       lambda_miss, lambda_fp, epsilon, iou_min
///     [fusion]     iou_threshold, confidence_rescale
///     [benchmark]  labels, scenes_per_label, min_objects, max_objects, seed
///     [training]   scenes_per_label, seed_offset
///     [output]     dir
struct RunConfig {
  std::filesystem::path source;
  std::vector<SensorModality> sensors;
  std::vector<Branch> branches;

  std::filesystem::path calibration_path;
  std::filesystem::path quality_path;
  std::filesystem::path knowledge_path;
  std::optional<std::filesystem::path> gate_table_path;

  std::vector<GateKind> gates;
  OptimizerParams optimizer;
  std::vector<double> lambdas;
  std::optional<int> max_config_size;

  GateKind compare_gate = GateKind::loss_oracle;
  std::vector<double> compare_lambdas{0.0, 0.01, 0.05};

  LossWeights loss;
  FusionParams fusion;

  BenchmarkSpec benchmark;
  int training_scenes_per_label = 50;
  std::uint64_t training_seed_offset = 1000003;

  std::filesystem::path output_dir = "out";

  BenchmarkSpec training_spec() const;
  void set_master_seed(std::uint64_t seed) { benchmark.seed = seed; }
};

RunConfig parse_run_config(const KvFile& file, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Loaded and cross-checked declarations, calibration and simulator for one run.
struct Experiment {
  RunConfig config;
  Calibration calibration;
  KnowledgeRules knowledge;
  Simulator sim;

  const ConfigurationSpace& space() const { return sim.space(); }

  /// The configuration holding every single-sensor branch (late fusion baseline).
  Configuration late_fusion() const;
};

Experiment load_experiment(RunConfig config);

}  // namespace ecofusion
