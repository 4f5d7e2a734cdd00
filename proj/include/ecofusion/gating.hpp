#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecofusion/core.hpp"

namespace ecofusion {

class Simulator;
struct Scene;

/// Estimated fusion loss per configuration, indexed like the ConfigurationSpace.
struct LossEstimateTable {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

/// Estimate given to every configuration a knowledge rule does not designate.
inline constexpr double kKnowledgeSentinel = 1e9;

enum class GateKind { knowledge, table_predictor, loss_oracle };

std::string_view to_string(GateKind k);
std::optional<GateKind> parse_gate_kind(std::string_view name);

// ---------------------------------------------------------------------------
// Knowledge gating

/// Context label -> designated configuration.
///
/// Text format: a [rules] section of `label = branch+branch` lines.
struct KnowledgeRules {
  std::map<ContextLabel, Configuration> rules;

  /// Every label must have a rule and every rule must lie in the space.
  void require_cover(std::span<const ContextLabel> labels, const ConfigurationSpace& space) const;

  static KnowledgeRules parse(std::string_view text, const std::string& origin = "<memory>");
  static KnowledgeRules load(const std::filesystem::path& path);
  std::string serialize() const;
};

/// 0 for the designated configuration, kKnowledgeSentinel elsewhere.
LossEstimateTable knowledge_gate(const Context& ctx, const KnowledgeRules& rules,
                                 const ConfigurationSpace& space);

// ---------------------------------------------------------------------------
// Table predictor (statistical stand-in for the learned gates)

struct GateLogEntry {
  ContextLabel label;
  Configuration config;
  double loss;
};

/// Mean realized loss per (label, configuration), plus a global row over all labels.
class GateTable {
 public:
  struct Cell {
    double sum = 0.0;
    long long count = 0;
    double mean() const { return sum / static_cast<double>(count); }
  };
  using Row = std::map<std::string, Cell>;  // configuration id -> cell

  bool empty() const { return global_.empty(); }
  const Row& global() const { return global_; }
  const std::map<ContextLabel, Row>& rows() const { return rows_; }
  const Row* row(ContextLabel label) const;

  void add(ContextLabel label, const std::string& config_id, double loss);

  /// Text format: [global] then [label.<name>] sections of `config = mean` lines.
  /// Means are written with round-trip precision; counts are not persisted.
  std::string serialize() const;
  static GateTable parse(std::string_view text, const std::string& origin = "<memory>");
  static GateTable load(const std::filesystem::path& path);

 private:
  Row global_;
  std::map<ContextLabel, Row> rows_;
};

/// Per-(label, configuration) arithmetic mean; entries are accumulated in log order.
GateTable fit_gate_table(std::span<const GateLogEntry> log);

/// Stored means for ctx.label (falling back to the global row for unseen labels, and per
/// configuration for configurations the label row lacks).
LossEstimateTable table_predictor_gate(const Context& ctx, const GateTable& table,
                                       const ConfigurationSpace& space);

// ---------------------------------------------------------------------------
// Loss oracle

/// Realized per-scene loss of every configuration, executed on the scene itself.
LossEstimateTable loss_oracle_gate(const Scene& scene, const Simulator& sim);

// ---------------------------------------------------------------------------
// Policy objects

class GatePolicy {
 public:
  virtual ~GatePolicy() = default;
  virtual GateKind kind() const = 0;
  virtual LossEstimateTable estimate(const Scene& scene, const ConfigurationSpace& space) const = 0;
  std::string name() const { return std::string(to_string(kind())); }
};

class KnowledgeGate final : public GatePolicy {
 public:
  explicit KnowledgeGate(KnowledgeRules rules) : rules_(std::move(rules)) {}
  GateKind kind() const override { return GateKind::knowledge; }
  LossEstimateTable estimate(const Scene& scene, const ConfigurationSpace& space) const override;

 private:
  KnowledgeRules rules_;
};

class TablePredictorGate final : public GatePolicy {
 public:
  explicit TablePredictorGate(GateTable table);
  GateKind kind() const override { return GateKind::table_predictor; }
  LossEstimateTable estimate(const Scene& scene, const ConfigurationSpace& space) const override;
  const GateTable& table() const { return table_; }

 private:
  GateTable table_;
};

/// Holds a reference to the simulator; it must outlive the gate.
class LossOracleGate final : public GatePolicy {
 public:
  explicit LossOracleGate(const Simulator& sim) : sim_(&sim) {}
  GateKind kind() const override { return GateKind::loss_oracle; }
  LossEstimateTable estimate(const Scene& scene, const ConfigurationSpace& space) const override;

 private:
  const Simulator* sim_;
};

}  // namespace ecofusion
