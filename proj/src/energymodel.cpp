#include "ecofusion/energymodel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ecofusion {

void EnergyProfile::validate() const {
  for (const auto& [id, c] : components) {
    if (!(c.energy_j >= 0.0) || !(c.latency_s >= 0.0) || !std::isfinite(c.energy_j) ||
        !std::isfinite(c.latency_s)) {
      throw ConfigError("component '" + id + "' must have finite non-negative energy and latency");
    }
  }
  if (!components.contains(kFusionBlockId)) throw ConfigError("energy profile lacks a fusion_block entry");
  for (const auto& [branch, stems] : stems_by_branch) {
    if (!components.contains(branch)) throw ConfigError("energy profile lacks branch '" + branch + "'");
    for (const auto& s : stems) {
      if (!components.contains(s)) throw ConfigError("energy profile lacks stem '" + s + "'");
    }
  }
}

std::map<std::string, std::vector<std::string>> stems_for_branches(
    std::span<const Branch> branches, const std::map<SensorModality, std::string>& stem_of_sensor) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& b : branches) {
    std::vector<std::string> stems;
    for (auto s : b.inputs) {
      auto it = stem_of_sensor.find(s);
      if (it == stem_of_sensor.end()) {
        throw ConfigError("no stem declared for sensor " + std::string(to_string(s)));
      }
      if (std::find(stems.begin(), stems.end(), it->second) == stems.end()) stems.push_back(it->second);
    }
    out.emplace(b.id, std::move(stems));
  }
  return out;
}

EnergyLatency config_energy(const Configuration& cfg, const EnergyProfile& profile) {
  const auto cost = [&](const std::string& id) -> const ComponentCost& {
    auto it = profile.components.find(id);
    if (it == profile.components.end()) throw Error("no energy entry for '" + id + "'");
    return it->second;
  };

  std::set<std::string> stems;
  EnergyLatency total;
  for (const auto& b : cfg.branches()) {
    auto it = profile.stems_by_branch.find(b);
    if (it == profile.stems_by_branch.end()) throw Error("unknown branch '" + b + "' in energy profile");
    stems.insert(it->second.begin(), it->second.end());
    const auto& c = cost(b);
    total.energy_j += c.energy_j;
    total.latency_s += c.latency_s;
  }
  for (const auto& s : stems) {
    const auto& c = cost(s);
    total.energy_j += c.energy_j;
    total.latency_s += c.latency_s;
  }
  if (cfg.size() > 1) {
    const auto& c = cost(kFusionBlockId);
    total.energy_j += c.energy_j;
    total.latency_s += c.latency_s;
  }
  return total;
}

void SensorPowerModel::validate() const {
  const auto name = std::string(to_string(sensor));
  if (!(motor_power_w >= 0.0 && motor_power_w <= total_power_w)) {
    throw ConfigError("sensor " + name + ": need 0 <= motor_power <= power");
  }
  if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz)) {
    throw ConfigError("sensor " + name + ": frequency must be positive");
  }
}

double sensor_energy(const SensorPowerModel& s, bool clock_gated) {
  const bool gated = clock_gated && s.clock_gateable;
  const double meas = gated ? 0.0 : s.measurement_power_w();
  return (meas + s.motor_power_w) / s.frequency_hz;
}

GatingPlan gating_plan_for(const Configuration& cfg, const ConfigurationSpace& space,
                           std::span<const SensorPowerModel> sensors) {
  const auto used = space.sensors_of(cfg);
  GatingPlan plan;
  for (const auto& s : sensors) {
    plan[s.sensor] = std::find(used.begin(), used.end(), s.sensor) == used.end();
  }
  return plan;
}

GatingPlan all_active(std::span<const SensorPowerModel> sensors) {
  GatingPlan plan;
  for (const auto& s : sensors) plan[s.sensor] = false;
  return plan;
}

double total_energy(const Configuration& cfg, const EnergyProfile& profile,
                    std::span<const SensorPowerModel> sensors, const GatingPlan& plan) {
  double e = config_energy(cfg, profile).energy_j;
  for (const auto& s : sensors) {
    auto it = plan.find(s.sensor);
    e += sensor_energy(s, it != plan.end() && it->second);
  }
  return e;
}

double energy_savings(double eco_j, double baseline_j) {
  if (!(baseline_j > 0.0)) throw Error("baseline energy must be positive");
  return 1.0 - eco_j / baseline_j;
}

Calibration parse_calibration(const KvFile& file, std::span<const Branch> branches) {
  Calibration cal;
  cal.profile.platform_power_w = file.get_double("", "platform_power", 45.4);

  if (const auto* stems = file.find("stems")) {
    for (const auto& [k, v] : stems->entries) {
      auto s = parse_sensor(k);
      if (!s) throw ConfigError(file.origin() + ": [stems] unknown sensor '" + k + "'");
      cal.stem_of_sensor[*s] = v;
    }
  }

  for (const auto& sec : file.sections()) {
    if (sec.name.starts_with("component.")) {
      const auto id = sec.name.substr(std::string("component.").size());
      ComponentCost c{id, file.require_double(sec.name, "energy"),
                      file.require_double(sec.name, "latency")};
      cal.profile.components.emplace(id, c);
    } else if (sec.name.starts_with("sensor.")) {
      const auto name = sec.name.substr(std::string("sensor.").size());
      auto s = parse_sensor(name);
      if (!s) throw ConfigError(file.origin() + ": unknown sensor section [" + sec.name + "]");
      SensorPowerModel m{*s, file.require_double(sec.name, "power"),
                         file.get_double(sec.name, "motor_power", 0.0),
                         file.require_double(sec.name, "frequency"),
                         file.get_bool(sec.name, "clock_gateable", true)};
      m.validate();
      cal.sensors.push_back(m);
    }
  }
  std::sort(cal.sensors.begin(), cal.sensors.end(),
            [](const auto& a, const auto& b) { return a.sensor < b.sensor; });

  if (const auto* mix = file.find("scenario_mix")) {
    for (const auto& [k, v] : mix->entries) {
      auto l = parse_label(k);
      if (!l) throw ConfigError(file.origin() + ": [scenario_mix] unknown label '" + k + "'");
      const double share = parse_double(v, "scenario_mix." + k);
      if (share < 0.0) throw ConfigError("scenario_mix." + k + " must be non-negative");
      cal.scenario_mix[*l] = share;
    }
  }

  cal.profile.stems_by_branch = stems_for_branches(branches, cal.stem_of_sensor);
  cal.profile.validate();
  return cal;
}

Calibration load_calibration(const std::filesystem::path& path, std::span<const Branch> branches) {
  return parse_calibration(KvFile::load(path), branches);
}

}  // namespace ecofusion
