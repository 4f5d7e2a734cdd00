#include "ecofusion/gating.hpp"

#include "ecofusion/kvfile.hpp"
#include "ecofusion/simbench.hpp"

namespace ecofusion {

std::string_view to_string(GateKind k) {
  switch (k) {
    case GateKind::knowledge: return "knowledge";
    case GateKind::table_predictor: return "table_predictor";
    case GateKind::loss_oracle: return "loss_oracle";
  }
  return "?";
}

std::optional<GateKind> parse_gate_kind(std::string_view name) {
  for (auto k : {GateKind::knowledge, GateKind::table_predictor, GateKind::loss_oracle}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

void KnowledgeRules::require_cover(std::span<const ContextLabel> labels,
                                   const ConfigurationSpace& space) const {
  for (auto l : labels) {
    auto it = rules.find(l);
    if (it == rules.end()) throw ConfigError("no rule for context '" + std::string(to_string(l)) + "'");
    if (!space.index_of(it->second)) {
      throw ConfigError("knowledge rule for '" + std::string(to_string(l)) + "' names configuration " +
                        it->second.id() + " outside the configuration space");
    }
  }
}

KnowledgeRules KnowledgeRules::parse(std::string_view text, const std::string& origin) {
  const auto file = KvFile::parse(text, origin);
  const auto* sec = file.find("rules");
  if (!sec) throw ConfigError(origin + ": missing [rules] section");
  KnowledgeRules out;
  for (const auto& [k, v] : sec->entries) {
    auto label = parse_label(k);
    if (!label) throw ConfigError(origin + ": unknown context label '" + k + "'");
    out.rules.emplace(*label, Configuration::parse(v));
  }
  return out;
}

KnowledgeRules KnowledgeRules::load(const std::filesystem::path& path) {
  return parse(read_text_file(path), path.string());
}

std::string KnowledgeRules::serialize() const {
  std::string out = "[rules]\n";
  for (const auto& [label, cfg] : rules) {
    out += std::string(to_string(label)) + " = " + cfg.id() + "\n";
  }
  return out;
}

LossEstimateTable knowledge_gate(const Context& ctx, const KnowledgeRules& rules,
                                 const ConfigurationSpace& space) {
  auto it = rules.rules.find(ctx.label);
  if (it == rules.rules.end()) {
    throw Error("no rule for context '" + std::string(to_string(ctx.label)) + "'");
  }
  const auto designated = space.require_index(it->second);
  LossEstimateTable t;
  t.values.assign(space.size(), kKnowledgeSentinel);
  t.values[designated] = 0.0;
  return t;
}

// ---------------------------------------------------------------------------

const GateTable::Row* GateTable::row(ContextLabel label) const {
  auto it = rows_.find(label);
  return it == rows_.end() ? nullptr : &it->second;
}

void GateTable::add(ContextLabel label, const std::string& config_id, double loss) {
  auto& g = global_[config_id];
  g.sum += loss;
  ++g.count;
  auto& c = rows_[label][config_id];
  c.sum += loss;
  ++c.count;
}

std::string GateTable::serialize() const {
  std::string out = "# mean realized per-scene loss by context label and configuration\n[global]\n";
  for (const auto& [cfg, cell] : global_) out += cfg + " = " + format_double(cell.mean()) + "\n";
  for (const auto& [label, row] : rows_) {
    out += "[label." + std::string(to_string(label)) + "]\n";
    for (const auto& [cfg, cell] : row) out += cfg + " = " + format_double(cell.mean()) + "\n";
  }
  return out;
}

GateTable GateTable::parse(std::string_view text, const std::string& origin) {
  const auto file = KvFile::parse(text, origin);
  GateTable t;
  for (const auto& sec : file.sections()) {
    if (sec.name.empty()) {
      if (!sec.entries.empty()) throw ConfigError(origin + ": entries outside a section");
      continue;
    }
    Row* row = nullptr;
    if (sec.name == "global") {
      row = &t.global_;
    } else if (sec.name.starts_with("label.")) {
      auto label = parse_label(sec.name.substr(6));
      if (!label) throw ConfigError(origin + ": unknown label section [" + sec.name + "]");
      row = &t.rows_[*label];
    } else {
      throw ConfigError(origin + ": unexpected section [" + sec.name + "]");
    }
    for (const auto& [k, v] : sec.entries) {
      const auto cfg = Configuration::parse(k).id();
      (*row)[cfg] = Cell{parse_double(v, sec.name + "." + k), 1};
    }
  }
  if (t.global_.empty()) throw ConfigError(origin + ": gate table has no [global] row");
  return t;
}

GateTable GateTable::load(const std::filesystem::path& path) {
  return parse(read_text_file(path), path.string());
}

GateTable fit_gate_table(std::span<const GateLogEntry> log) {
  if (log.empty()) throw Error("cannot fit a gate table from an empty log");
  GateTable t;
  for (const auto& e : log) t.add(e.label, e.config.id(), e.loss);
  return t;
}

LossEstimateTable table_predictor_gate(const Context& ctx, const GateTable& table,
                                       const ConfigurationSpace& space) {
  if (table.empty()) throw Error("gate table was trained on zero scenes");
  const auto* row = table.row(ctx.label);
  LossEstimateTable t;
  t.values.reserve(space.size());
  for (const auto& cfg : space.configs()) {
    const auto id = cfg.id();
    if (row) {
      if (auto it = row->find(id); it != row->end()) {
        t.values.push_back(it->second.mean());
        continue;
      }
    }
    auto it = table.global().find(id);
    if (it == table.global().end()) throw Error("gate table has no estimate for configuration " + id);
    t.values.push_back(it->second.mean());
  }
  return t;
}

// ---------------------------------------------------------------------------

LossEstimateTable loss_oracle_gate(const Scene& scene, const Simulator& sim) {
  const auto outputs = sim.simulate_all(scene);
  LossEstimateTable t;
  t.values.reserve(sim.space().size());
  for (const auto& cfg : sim.space().configs()) {
    t.values.push_back(sim.realized_loss(cfg, scene, outputs));
  }
  return t;
}

LossEstimateTable KnowledgeGate::estimate(const Scene& scene, const ConfigurationSpace& space) const {
  return knowledge_gate(scene.context, rules_, space);
}

TablePredictorGate::TablePredictorGate(GateTable table) : table_(std::move(table)) {
  if (table_.empty()) throw Error("gate table was trained on zero scenes");
}

LossEstimateTable TablePredictorGate::estimate(const Scene& scene,
                                               const ConfigurationSpace& space) const {
  return table_predictor_gate(scene.context, table_, space);
}

LossEstimateTable LossOracleGate::estimate(const Scene& scene, const ConfigurationSpace& space) const {
  if (space.size() != sim_->space().size()) {
    throw Error("loss oracle space differs from the simulator's space");
  }
  return loss_oracle_gate(scene, *sim_);
}

}  // namespace ecofusion
