#include "ecofusion/optimizer.hpp"

#include <cmath>

#include "ecofusion/core.hpp"

namespace ecofusion {

void OptimizerParams::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be >= 0");
  if (!(lambda_e >= 0.0 && lambda_e <= 1.0)) throw ConfigError("lambda_e must lie in [0, 1]");
  if (!(energy_scale > 0.0) || !std::isfinite(energy_scale)) {
    throw ConfigError("energy_scale must be positive");
  }
}

ConfigIndex best_loss_index(std::span<const double> estimates) {
  if (estimates.empty()) throw Error("empty loss estimate table");
  ConfigIndex best = 0;
  for (ConfigIndex i = 1; i < estimates.size(); ++i) {
    if (estimates[i] < estimates[best]) best = i;
  }
  return best;
}

std::vector<ConfigIndex> candidate_set(std::span<const double> estimates, double gamma) {
  const auto best = best_loss_index(estimates);
  const double limit = estimates[best] + gamma;
  std::vector<ConfigIndex> out;
  for (ConfigIndex i = 0; i < estimates.size(); ++i) {
    if (estimates[i] <= limit) out.push_back(i);
  }
  return out;
}

double joint_loss(double loss, double energy_j, const OptimizerParams& params) {
  return (1.0 - params.lambda_e) * loss + params.lambda_e * (energy_j / params.energy_scale);
}

SelectionResult select_configuration(std::span<const double> estimates,
                                     std::span<const double> energies,
                                     const OptimizerParams& params) {
  params.validate();
  if (energies.size() != estimates.size()) {
    throw Error("energy table does not cover the configuration space");
  }
  SelectionResult r;
  r.best_loss = best_loss_index(estimates);
  r.candidates = candidate_set(estimates, params.gamma);
  r.joint_losses.reserve(r.candidates.size());

  bool have = false;
  double best_joint = 0.0;
  for (auto i : r.candidates) {
    const double j = joint_loss(estimates[i], energies[i], params);
    r.joint_losses.push_back(j);
    if (!have || j < best_joint || (j == best_joint && energies[i] < energies[r.chosen])) {
      have = true;
      best_joint = j;
      r.chosen = i;
    }
  }
  return r;
}

std::vector<SweepPoint> pareto_sweep(std::span<const double> estimates, std::span<const double> energies,
                                     double gamma, std::span<const double> lambdas,
                                     double energy_scale) {
  if (lambdas.empty()) throw Error("lambda list is empty");
  std::vector<SweepPoint> out;
  out.reserve(lambdas.size());
  for (double lam : lambdas) {
    OptimizerParams p{gamma, lam, energy_scale};
    auto sel = select_configuration(estimates, energies, p);
    const auto chosen = sel.chosen;
    out.push_back(SweepPoint{lam, std::move(sel), estimates[chosen], energies[chosen]});
  }
  return out;
}

}  // namespace ecofusion
