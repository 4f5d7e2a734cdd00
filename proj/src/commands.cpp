#include "ecofusion/commands.hpp"

#include <algorithm>
#include <memory>
#include <ostream>

#include "ecofusion/eval.hpp"
#include "ecofusion/gating.hpp"
#include "ecofusion/simbench.hpp"

namespace ecofusion {

namespace {

constexpr const char* kLossNote =
    "loss = per-scene mean detection loss (scene total divided by max(1, ground-truth objects))";

SceneOutcome outcome_of(const PipelineResult& r, const Scene& scene) {
  return SceneOutcome{r.label, r.realized_loss, r.energy_j, r.latency_s, r.detections, scene.objects};
}

struct Aggregate {
  double mean_loss = 0.0;
  double mean_energy_j = 0.0;
  double mean_latency_s = 0.0;
  std::optional<double> map;
};

Aggregate aggregate(std::span<const SceneOutcome> outcomes) {
  const auto rows = scenario_report(outcomes);
  const auto& overall = rows.back();
  return Aggregate{overall.mean_loss, overall.mean_energy_j, overall.mean_latency_s, overall.map};
}

std::unique_ptr<GatePolicy> make_gate(GateKind kind, const Experiment& exp, unsigned workers) {
  switch (kind) {
    case GateKind::knowledge: return std::make_unique<KnowledgeGate>(exp.knowledge);
    case GateKind::table_predictor:
      return std::make_unique<TablePredictorGate>(obtain_gate_table(exp, workers));
    case GateKind::loss_oracle: return std::make_unique<LossOracleGate>(exp.sim);
  }
  throw Error("unknown gate kind");
}

/// results[scene][lambda] for one gate.
std::vector<std::vector<PipelineResult>> run_gate(const Experiment& exp, const GatePolicy& gate,
                                                  std::span<const Scene> scenes,
                                                  std::span<const double> lambdas, unsigned workers) {
  std::vector<std::vector<PipelineResult>> out(scenes.size());
  parallel_for(scenes.size(), workers, [&](std::size_t i) {
    out[i] = run_pipeline_sweep(scenes[i], gate, exp.sim, exp.calibration.profile, exp.config.optimizer.gamma,
                                lambdas, exp.config.optimizer.energy_scale);
  });
  return out;
}

std::vector<SceneOutcome> run_static_all(const Experiment& exp, const Configuration& cfg,
                                         std::span<const Scene> scenes, unsigned workers) {
  std::vector<SceneOutcome> out(scenes.size());
  parallel_for(scenes.size(), workers, [&](std::size_t i) {
    out[i] = outcome_of(run_static(scenes[i], cfg, exp.sim, exp.calibration.profile), scenes[i]);
  });
  return out;
}

std::string sensor_list(const std::vector<SensorModality>& sensors) {
  std::string s;
  for (auto m : sensors) {
    if (!s.empty()) s += ' ';
    s += to_string(m);
  }
  return s.empty() ? "-" : s;
}

}  // namespace

RunConfig resolve_config(const CommandOptions& opts) {
  auto cfg = load_run_config(opts.config_path);
  if (opts.seed) cfg.set_master_seed(*opts.seed);
  if (opts.output_dir) cfg.output_dir = *opts.output_dir;
  return cfg;
}

std::vector<GateLogEntry> oracle_training_log(const Experiment& exp, unsigned workers) {
  const auto spec = exp.config.training_spec();
  if (spec.scenes_per_label < 1) throw Error("training benchmark is empty");
  const auto scenes = generate_benchmark(spec);
  const auto& space = exp.space();
  std::vector<LossEstimateTable> tables(scenes.size());
  parallel_for(scenes.size(), workers, [&](std::size_t i) { tables[i] = loss_oracle_gate(scenes[i], exp.sim); });

  std::vector<GateLogEntry> log;
  log.reserve(scenes.size() * space.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    for (std::size_t c = 0; c < space.size(); ++c) {
      log.push_back(GateLogEntry{scenes[i].context.label, space[c], tables[i][c]});
    }
  }
  return log;
}

GateTable obtain_gate_table(const Experiment& exp, unsigned workers) {
  if (exp.config.gate_table_path) return GateTable::load(*exp.config.gate_table_path);
  return fit_gate_table(oracle_training_log(exp, workers));
}

CommandResult cmd_sweep(const Experiment& exp, unsigned workers) {
  const auto scenes = generate_benchmark(exp.config.benchmark);
  const auto& lambdas = exp.config.lambdas;

  Table summary;
  summary.columns = {"lambda", "gate", "mean_loss", "mean_energy_j", "mean_latency_s", "map"};
  summary.notes = {kLossNote, "energy = compute energy of the executed configuration"};
  Table detail;
  detail.columns = {"lambda",         "gate",          "scene",    "label",    "configuration",
                    "estimated_loss", "realized_loss", "energy_j", "latency_s"};

  for (auto kind : exp.config.gates) {
    const auto gate = make_gate(kind, exp, workers);
    const auto results = run_gate(exp, *gate, scenes, lambdas, workers);
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      std::vector<SceneOutcome> outcomes;
      outcomes.reserve(scenes.size());
      for (std::size_t i = 0; i < scenes.size(); ++i) {
        const auto& r = results[i][l];
        outcomes.push_back(outcome_of(r, scenes[i]));
        detail.add_row({fixed(lambdas[l], 4), gate->name(), std::to_string(r.scene_id),
                        std::string(to_string(r.label)), r.chosen.id(), fixed(r.estimated_loss),
                        fixed(r.realized_loss), fixed(r.energy_j), fixed(r.latency_s)});
      }
      const auto agg = aggregate(outcomes);
      summary.add_row({fixed(lambdas[l], 4), gate->name(), fixed(agg.mean_loss), fixed(agg.mean_energy_j),
                       fixed(agg.mean_latency_s), fixed(agg.map)});
    }
  }
  CommandResult res;
  res.tables.emplace_back("sweep", std::move(summary));
  res.tables.emplace_back("sweep_scenes", std::move(detail));
  return res;
}

CommandResult cmd_compare_fusion(const Experiment& exp, unsigned workers) {
  const auto scenes = generate_benchmark(exp.config.benchmark);
  const auto& profile = exp.calibration.profile;

  Table t;
  t.columns = {"fusion_type", "configuration", "lambda", "map", "mean_loss", "energy_j", "latency_ms"};
  t.notes = {kLossNote, "static rows: energy and latency are the configuration's per-frame cost"};

  auto add_static = [&](const std::string& type, const Configuration& cfg) {
    const auto outcomes = run_static_all(exp, cfg, scenes, workers);
    const auto agg = aggregate(outcomes);
    const auto cost = config_energy(cfg, profile);
    t.add_row({type, cfg.id(), "-", fixed(agg.map), fixed(agg.mean_loss), fixed(cost.energy_j, 4),
               fixed(cost.latency_s * 1e3, 3)});
  };

  for (const auto& b : exp.config.branches) {
    if (b.kind == BranchKind::single) add_static("none", Configuration({b.id}));
  }
  for (const auto& b : exp.config.branches) {
    if (b.kind == BranchKind::early_fusion) add_static("early", Configuration({b.id}));
  }
  add_static("late", exp.late_fusion());

  const auto gate = make_gate(exp.config.compare_gate, exp, workers);
  const auto& lambdas = exp.config.compare_lambdas;
  const auto results = run_gate(exp, *gate, scenes, lambdas, workers);
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    std::vector<SceneOutcome> outcomes;
    for (std::size_t i = 0; i < scenes.size(); ++i) outcomes.push_back(outcome_of(results[i][l], scenes[i]));
    const auto agg = aggregate(outcomes);
    t.add_row({"ecofusion", gate->name(), fixed(lambdas[l], 4), fixed(agg.map), fixed(agg.mean_loss),
               fixed(agg.mean_energy_j, 4), fixed(agg.mean_latency_s * 1e3, 3)});
  }
  CommandResult res;
  res.tables.emplace_back("compare_fusion", std::move(t));
  return res;
}

CommandResult cmd_clockgate(const Experiment& exp) {
  const auto& cal = exp.calibration;
  const auto& space = exp.space();
  const auto late = exp.late_fusion();
  const double late_j = total_energy(late, cal.profile, cal.sensors, all_active(cal.sensors));

  Table t;
  t.columns = {"label", "late_fusion_j", "ecofusion_j", "savings_pct", "configuration", "gated_sensors"};
  t.notes = {"energy = compute energy plus per-frame sensor energy; unused sensors clock gated"};

  double weighted_late = 0.0;
  double weighted_eco = 0.0;
  double weight_sum = 0.0;
  for (auto label : exp.config.benchmark.labels) {
    auto it = exp.knowledge.rules.find(label);
    if (it == exp.knowledge.rules.end()) throw Error("no rule for context '" + std::string(to_string(label)) + "'");
    const auto& cfg = it->second;
    const auto plan = gating_plan_for(cfg, space, cal.sensors);
    const double eco_j = total_energy(cfg, cal.profile, cal.sensors, plan);
    std::vector<SensorModality> gated;
    for (const auto& s : cal.sensors) {
      auto p = plan.find(s.sensor);
      if (p != plan.end() && p->second && s.clock_gateable) gated.push_back(s.sensor);
    }
    t.add_row({std::string(to_string(label)), fixed(late_j, 4), fixed(eco_j, 4),
               fixed(100.0 * energy_savings(eco_j, late_j), 2), cfg.id(), sensor_list(gated)});

    double w = 1.0;
    if (!cal.scenario_mix.empty()) {
      auto m = cal.scenario_mix.find(label);
      w = m == cal.scenario_mix.end() ? 0.0 : m->second;
    }
    weighted_late += w * late_j;
    weighted_eco += w * eco_j;
    weight_sum += w;
  }
  if (weight_sum <= 0.0) throw ConfigError("scenario_mix gives zero weight to every benchmark label");
  const double o_late = weighted_late / weight_sum;
  const double o_eco = weighted_eco / weight_sum;
  t.add_row({"Overall", fixed(o_late, 4), fixed(o_eco, 4), fixed(100.0 * energy_savings(o_eco, o_late), 2),
             "-", "-"});
  if (!cal.scenario_mix.empty()) t.notes.emplace_back("Overall row weighted by the calibration scenario_mix");

  CommandResult res;
  res.tables.emplace_back("clockgate", std::move(t));
  return res;
}

CommandResult cmd_fit_gate(const Experiment& exp, unsigned workers) {
  const auto table = fit_gate_table(oracle_training_log(exp, workers));
  const auto scenes = generate_benchmark(exp.config.benchmark);
  const double lam0[] = {0.0};

  Table t;
  t.columns = {"policy", "mean_loss", "mean_energy_j", "map"};
  t.notes = {kLossNote, "held-out benchmark, lambda = 0"};

  auto add_gate = [&](const GatePolicy& gate) {
    const auto results = run_gate(exp, gate, scenes, lam0, workers);
    std::vector<SceneOutcome> outcomes;
    for (std::size_t i = 0; i < scenes.size(); ++i) outcomes.push_back(outcome_of(results[i][0], scenes[i]));
    const auto agg = aggregate(outcomes);
    t.add_row({gate.name(), fixed(agg.mean_loss), fixed(agg.mean_energy_j), fixed(agg.map)});
  };
  add_gate(LossOracleGate(exp.sim));
  add_gate(TablePredictorGate(table));
  for (const auto& b : exp.config.branches) {
    if (b.kind != BranchKind::single) continue;
    const auto agg = aggregate(run_static_all(exp, Configuration({b.id}), scenes, workers));
    t.add_row({"static:" + b.id, fixed(agg.mean_loss), fixed(agg.mean_energy_j), fixed(agg.map)});
  }

  CommandResult res;
  res.tables.emplace_back("fit_gate", std::move(t));
  res.files.emplace_back("gate_table.txt", table.serialize());
  return res;
}

CommandResult cmd_generate_scenes(const Experiment& exp) {
  const auto scenes = generate_benchmark(exp.config.benchmark);
  Table t;
  t.columns = {"label", "scenes", "objects"};
  for (auto label : exp.config.benchmark.labels) {
    std::size_t n = 0;
    std::size_t objects = 0;
    for (const auto& s : scenes) {
      if (s.context.label != label) continue;
      ++n;
      objects += s.objects.size();
    }
    t.add_row({std::string(to_string(label)), std::to_string(n), std::to_string(objects)});
  }
  CommandResult res;
  res.tables.emplace_back("scenes_summary", std::move(t));
  res.files.emplace_back("scenes.txt", serialize_scenes(scenes));
  return res;
}

std::vector<std::filesystem::path> write_result(const CommandResult& result, const std::filesystem::path& dir,
                                                OutputFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

  // render everything first so a failure leaves no partial output behind
  std::vector<std::pair<std::filesystem::path, std::string>> pending;
  for (const auto& [stem, table] : result.tables) {
    pending.emplace_back(dir / (stem + std::string(extension(format))), table.render(format));
  }
  for (const auto& [name, contents] : result.files) pending.emplace_back(dir / name, contents);

  std::vector<std::filesystem::path> written;
  for (const auto& [path, contents] : pending) {
    write_file_atomic(path, contents);
    written.push_back(path);
  }
  return written;
}

int run_command(const std::string& name, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> known = {"sweep", "compare-fusion", "clockgate", "fit-gate",
                                                 "generate-scenes"};
  if (std::find(known.begin(), known.end(), name) == known.end()) {
    err << "error: unknown command '" << name << "'\n";
    return kExitUsage;
  }
  try {
    const auto exp = load_experiment(resolve_config(opts));
    CommandResult res;
    if (name == "sweep") {
      res = cmd_sweep(exp, opts.workers);
    } else if (name == "compare-fusion") {
      res = cmd_compare_fusion(exp, opts.workers);
    } else if (name == "clockgate") {
      res = cmd_clockgate(exp);
    } else if (name == "fit-gate") {
      res = cmd_fit_gate(exp, opts.workers);
    } else {
      res = cmd_generate_scenes(exp);
    }
    const auto written = write_result(res, exp.config.output_dir, opts.format);
    for (const auto& [stem, table] : res.tables) {
      if (stem == "sweep_scenes") continue;
      out << table.to_text() << '\n';
    }
    for (const auto& p : written) out << "wrote " << p.string() << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace ecofusion
