#include "ecofusion/runconfig.hpp"

#include <algorithm>

namespace ecofusion {

namespace {

std::vector<double> parse_lambda_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& w : split_words(text)) {
    const double v = parse_double(w, what);
    if (v < 0.0 || v > 1.0) throw ConfigError(what + ": lambda values must lie in [0, 1]");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(what + ": empty lambda list");
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

BenchmarkSpec RunConfig::training_spec() const {
  BenchmarkSpec t = benchmark;
  t.scenes_per_label = training_scenes_per_label;
  t.seed = benchmark.seed + training_seed_offset;
  return t;
}

RunConfig parse_run_config(const KvFile& file, const std::filesystem::path& base_dir) {
  RunConfig c;
  c.source = file.origin();

  for (const auto& w : split_words(file.require("sensors", "declare"))) {
    auto s = parse_sensor(w);
    if (!s) throw ConfigError("sensors.declare: unknown sensor '" + w + "'");
    if (std::find(c.sensors.begin(), c.sensors.end(), *s) != c.sensors.end()) {
      throw ConfigError("sensors.declare: duplicate sensor '" + w + "'");
    }
    c.sensors.push_back(*s);
  }

  const auto* branches = file.find("branches");
  if (!branches || branches->entries.empty()) throw ConfigError("missing [branches] declarations");
  for (const auto& [id, inputs] : branches->entries) {
    std::vector<SensorModality> in;
    for (const auto& w : split_words(inputs)) {
      auto s = parse_sensor(w);
      if (!s) throw ConfigError("branches." + id + ": unknown sensor '" + w + "'");
      if (std::find(c.sensors.begin(), c.sensors.end(), *s) == c.sensors.end()) {
        throw ConfigError("branches." + id + ": sensor '" + w + "' is not declared");
      }
      in.push_back(*s);
    }
    c.branches.push_back(make_branch(id, std::move(in)));
  }

  c.calibration_path = resolve(base_dir, file.require("files", "calibration"));
  c.quality_path = resolve(base_dir, file.require("files", "quality"));
  c.knowledge_path = resolve(base_dir, file.require("files", "knowledge"));
  if (auto g = file.get("files", "gate_table")) c.gate_table_path = resolve(base_dir, *g);

  for (const auto& w : split_words(file.get("gates", "policies").value_or("loss_oracle"))) {
    auto k = parse_gate_kind(w);
    if (!k) throw ConfigError("gates.policies: unknown gate '" + w + "'");
    c.gates.push_back(*k);
  }
  if (c.gates.empty()) throw ConfigError("gates.policies: no gate selected");

  c.optimizer.gamma = file.get_double("optimizer", "gamma", 0.5);
  c.optimizer.lambda_e = file.get_double("optimizer", "lambda", 0.01);
  c.optimizer.energy_scale = file.get_double("optimizer", "energy_scale", 1.0);
  try {
    c.optimizer.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("optimizer: ") + e.what());
  }
  c.lambdas = parse_lambda_list(file.get("optimizer", "lambdas").value_or("0 0.01 0.05 0.1 0.5 1.0"),
                                "optimizer.lambdas");
  if (auto m = file.get("optimizer", "max_config_size")) {
    c.max_config_size = static_cast<int>(parse_int(*m, "optimizer.max_config_size"));
    if (*c.max_config_size < 1) throw ConfigError("optimizer.max_config_size must be >= 1");
  }

  if (auto g = file.get("compare", "gate")) {
    auto k = parse_gate_kind(*g);
    if (!k) throw ConfigError("compare.gate: unknown gate '" + *g + "'");
    c.compare_gate = *k;
  }
  if (auto l = file.get("compare", "lambdas")) c.compare_lambdas = parse_lambda_list(*l, "compare.lambdas");

  c.loss.lambda_miss = file.get_double("loss", "lambda_miss", c.loss.lambda_miss);
  c.loss.lambda_fp = file.get_double("loss", "lambda_fp", c.loss.lambda_fp);
  c.loss.epsilon = file.get_double("loss", "epsilon", c.loss.epsilon);
  c.loss.iou_min = file.get_double("loss", "iou_min", c.loss.iou_min);
  c.loss.validate();

  c.fusion.iou_threshold = file.get_double("fusion", "iou_threshold", c.fusion.iou_threshold);
  c.fusion.confidence_rescale = file.get_bool("fusion", "confidence_rescale", c.fusion.confidence_rescale);
  c.fusion.validate();

  const auto labels = file.get("benchmark", "labels");
  if (labels) {
    for (const auto& w : split_words(*labels)) {
      auto l = parse_label(w);
      if (!l) throw ConfigError("benchmark.labels: unknown label '" + w + "'");
      c.benchmark.labels.push_back(*l);
    }
  } else {
    c.benchmark.labels.assign(kAllLabels.begin(), kAllLabels.end());
  }
  if (c.benchmark.labels.empty()) throw ConfigError("benchmark.labels: no labels");
  c.benchmark.scenes_per_label = static_cast<int>(file.get_int("benchmark", "scenes_per_label", 100));
  c.benchmark.objects.min = static_cast<int>(file.get_int("benchmark", "min_objects", 3));
  c.benchmark.objects.max = static_cast<int>(file.get_int("benchmark", "max_objects", 8));
  c.benchmark.seed = static_cast<std::uint64_t>(file.get_int("benchmark", "seed", 1));
  if (c.benchmark.scenes_per_label < 1) throw ConfigError("benchmark.scenes_per_label must be >= 1");
  if (c.benchmark.objects.min < 0 || c.benchmark.objects.max < c.benchmark.objects.min) {
    throw ConfigError("benchmark: need 0 <= min_objects <= max_objects");
  }

  c.training_scenes_per_label = static_cast<int>(file.get_int("training", "scenes_per_label", 50));
  c.training_seed_offset = static_cast<std::uint64_t>(file.get_int("training", "seed_offset", 1000003));
  if (c.training_scenes_per_label < 0) throw ConfigError("training.scenes_per_label must be >= 0");

  c.output_dir = resolve(std::filesystem::current_path(), file.get("output", "dir").value_or("out"));
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const auto file = KvFile::load(path);
  return parse_run_config(file, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

Configuration Experiment::late_fusion() const {
  std::vector<std::string> ids;
  for (const auto& b : config.branches) {
    if (b.kind == BranchKind::single) ids.push_back(b.id);
  }
  if (ids.empty()) throw ConfigError("no single-sensor branches declared");
  return Configuration(std::move(ids));
}

Experiment load_experiment(RunConfig config) {
  auto calibration = load_calibration(config.calibration_path, config.branches);
  for (auto s : config.sensors) {
    const bool found = std::any_of(calibration.sensors.begin(), calibration.sensors.end(),
                                   [&](const SensorPowerModel& m) { return m.sensor == s; });
    if (!found) {
      throw ConfigError(config.calibration_path.string() + ": no [sensor." + std::string(to_string(s)) +
                        "] entry");
    }
  }
  std::erase_if(calibration.sensors, [&](const SensorPowerModel& m) {
    return std::find(config.sensors.begin(), config.sensors.end(), m.sensor) == config.sensors.end();
  });

  auto quality = QualityMatrix::load(config.quality_path);
  quality.require_complete(config.benchmark.labels, config.branches);
  auto knowledge = KnowledgeRules::load(config.knowledge_path);
  auto space = enumerate_configurations(config.branches, config.max_config_size);
  knowledge.require_cover(config.benchmark.labels, space);

  Simulator sim(std::move(space), std::move(quality), config.fusion, config.loss);
  return Experiment{std::move(config), std::move(calibration), std::move(knowledge), std::move(sim)};
}

}  // namespace ecofusion
