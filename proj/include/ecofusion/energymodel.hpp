#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecofusion/core.hpp"
#include "ecofusion/kvfile.hpp"

namespace ecofusion {

inline constexpr const char* kFusionBlockId = "fusion_block";

struct ComponentCost {
  std::string id;
  double energy_j = 0.0;
  double latency_s = 0.0;
};

struct EnergyLatency {
  double energy_j = 0.0;
  double latency_s = 0.0;
};

/// Offline per-component cost table for the compute platform.
///
/// A configuration pays for each distinct stem feeding its branches, each branch, and the
/// fusion block when it holds more than one branch. Latencies add up (sequential model).
struct EnergyProfile {
  std::map<std::string, ComponentCost> components;
  std::map<std::string, std::vector<std::string>> stems_by_branch;
  double platform_power_w = 45.4;

  /// Checks every branch/stem referenced has a cost entry and a fusion block entry exists.
  void validate() const;
};

/// Builds the branch -> stems map from branch declarations and a sensor -> stem assignment.
std::map<std::string, std::vector<std::string>> stems_for_branches(
    std::span<const Branch> branches, const std::map<SensorModality, std::string>& stem_of_sensor);

EnergyLatency config_energy(const Configuration& cfg, const EnergyProfile& profile);

struct SensorPowerModel {
  SensorModality sensor = SensorModality::camera_left;
  double total_power_w = 0.0;
  double motor_power_w = 0.0;
  double frequency_hz = 1.0;
  bool clock_gateable = true;

  double measurement_power_w() const { return total_power_w - motor_power_w; }
  void validate() const;
};

/// Energy per frame: (P_meas + P_motor) / f, with P_meas zeroed when clock gated.
/// A gating request on a sensor that is not clock gateable is ignored.
double sensor_energy(const SensorPowerModel& s, bool clock_gated);

/// Sensors marked true are clock gated; absent sensors count as active.
using GatingPlan = std::map<SensorModality, bool>;

/// Gates every declared sensor that no branch of cfg reads.
GatingPlan gating_plan_for(const Configuration& cfg, const ConfigurationSpace& space,
                           std::span<const SensorPowerModel> sensors);

/// Plan with every sensor active.
GatingPlan all_active(std::span<const SensorPowerModel> sensors);

/// config_energy plus every declared sensor's per-frame energy under the plan.
double total_energy(const Configuration& cfg, const EnergyProfile& profile,
                    std::span<const SensorPowerModel> sensors, const GatingPlan& plan);

/// Savings fraction 1 - eco / baseline.
double energy_savings(double eco_j, double baseline_j);

/// Everything the calibration file carries.
struct Calibration {
  EnergyProfile profile;
  std::vector<SensorPowerModel> sensors;
  std::map<SensorModality, std::string> stem_of_sensor;
  std::map<ContextLabel, double> scenario_mix;  // label -> share; empty = unweighted
};

/// Parses the calibration text format:
///
///     platform_power = 45.4
///     [stems]            sensor = stem id
///     [component.<id>]   energy = J, latency = s
///     [sensor.<name>]    power, motor_power, frequency, clock_gateable
///     [scenario_mix]     label = share
Calibration parse_calibration(const KvFile& file, std::span<const Branch> branches);
Calibration load_calibration(const std::filesystem::path& path, std::span<const Branch> branches);

}  // namespace ecofusion
