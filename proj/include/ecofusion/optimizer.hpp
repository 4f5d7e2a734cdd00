#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ecofusion {

/// Configurations are referred to by their index in a ConfigurationSpace; index order is
/// the canonical order, so "lowest index" is the deterministic tie-break everywhere below.
using ConfigIndex = std::size_t;

struct OptimizerParams {
  double gamma = 0.5;
  double lambda_e = 0.0;
  double energy_scale = 1.0;

  void validate() const;
};

struct SelectionResult {
  ConfigIndex chosen = 0;               // φ*
  ConfigIndex best_loss = 0;            // φ′
  std::vector<ConfigIndex> candidates;  // Φ*, canonical order
  std::vector<double> joint_losses;     // parallel to candidates
};

/// Φ*: every configuration whose estimated loss is within gamma of the minimum.
std::vector<ConfigIndex> candidate_set(std::span<const double> estimates, double gamma);

/// Index of the minimum estimate (lowest index on ties).
ConfigIndex best_loss_index(std::span<const double> estimates);

/// (1 - λ_E) * loss + λ_E * energy / energy_scale.
double joint_loss(double loss, double energy_j, const OptimizerParams& params);

/// argmin of the joint loss over Φ*; ties go to lower energy, then canonical order.
SelectionResult select_configuration(std::span<const double> estimates,
                                     std::span<const double> energies,
                                     const OptimizerParams& params);

struct SweepPoint {
  double lambda_e = 0.0;
  SelectionResult selection;
  double estimated_loss = 0.0;
  double energy_j = 0.0;
};

/// One selection per λ_E, in input order.
std::vector<SweepPoint> pareto_sweep(std::span<const double> estimates, std::span<const double> energies,
                                     double gamma, std::span<const double> lambdas,
                                     double energy_scale = 1.0);

}  // namespace ecofusion
