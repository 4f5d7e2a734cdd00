#include "ecofusion/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace ecofusion {

const std::vector<ObjectClass>& object_classes() {
  static const std::vector<ObjectClass> classes = {
      {0, "car"},       {1, "van"},     {2, "truck"},      {3, "bus"},
      {4, "motorbike"}, {5, "bicycle"}, {6, "pedestrian"}, {7, "pedestrian_group"},
  };
  return classes;
}

int num_object_classes() { return static_cast<int>(object_classes().size()); }

const std::string& class_name(int id) {
  const auto& classes = object_classes();
  if (id < 0 || id >= static_cast<int>(classes.size())) {
    throw Error("unknown object class id " + std::to_string(id));
  }
  return classes[static_cast<std::size_t>(id)].name;
}

bool BoundingBox::valid() const {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) &&
         x1 < x2 && y1 < y2;
}

BoundingBox make_box(double x1, double y1, double x2, double y2) {
  BoundingBox b{x1, y1, x2, y2};
  if (!b.valid()) {
    throw Error("invalid bounding box (" + std::to_string(x1) + ", " + std::to_string(y1) + ", " +
                std::to_string(x2) + ", " + std::to_string(y2) + ")");
  }
  return b;
}

std::string_view to_string(SensorModality s) {
  switch (s) {
    case SensorModality::camera_left: return "camera_left";
    case SensorModality::camera_right: return "camera_right";
    case SensorModality::lidar: return "lidar";
    case SensorModality::radar: return "radar";
  }
  return "?";
}

std::optional<SensorModality> parse_sensor(std::string_view name) {
  for (auto s : kAllSensors) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view to_string(BranchKind k) {
  return k == BranchKind::single ? "single" : "early_fusion";
}

Branch make_branch(std::string id, std::vector<SensorModality> inputs) {
  if (id.empty() || id.find('+') != std::string::npos) {
    throw ConfigError("invalid branch id '" + id + "'");
  }
  std::sort(inputs.begin(), inputs.end());
  inputs.erase(std::unique(inputs.begin(), inputs.end()), inputs.end());
  if (inputs.empty()) throw ConfigError("branch '" + id + "' has no inputs");
  const auto kind = inputs.size() == 1 ? BranchKind::single : BranchKind::early_fusion;
  return Branch{std::move(id), std::move(inputs), kind};
}

Configuration::Configuration(std::vector<std::string> branch_ids) : branches_(std::move(branch_ids)) {
  std::sort(branches_.begin(), branches_.end());
  branches_.erase(std::unique(branches_.begin(), branches_.end()), branches_.end());
  if (branches_.empty()) throw Error("configuration must contain at least one branch");
}

Configuration Configuration::parse(std::string_view text) {
  std::vector<std::string> ids;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('+', start), text.size());
    auto part = text.substr(start, end - start);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    if (part.empty()) throw ConfigError("malformed configuration '" + std::string(text) + "'");
    ids.emplace_back(part);
    start = end + 1;
  }
  return Configuration(std::move(ids));
}

bool Configuration::contains(std::string_view branch_id) const {
  return std::binary_search(branches_.begin(), branches_.end(), branch_id);
}

std::string Configuration::id() const {
  std::string out;
  for (const auto& b : branches_) {
    if (!out.empty()) out += '+';
    out += b;
  }
  return out;
}

bool canonical_less(const Configuration& a, const Configuration& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.branches() < b.branches();
}

ConfigurationSpace::ConfigurationSpace(std::vector<Branch> branches,
                                       std::vector<Configuration> configs)
    : branches_(std::move(branches)), configs_(std::move(configs)) {
  if (configs_.empty()) throw Error("empty configuration space");
  std::sort(configs_.begin(), configs_.end(), canonical_less);
  for (std::size_t i = 0; i < configs_.size(); ++i) {
    for (const auto& id : configs_[i].branches()) (void)branch(id);
    if (!index_.emplace(configs_[i].id(), i).second) {
      throw Error("duplicate configuration " + configs_[i].id());
    }
  }
}

std::optional<std::size_t> ConfigurationSpace::index_of(const Configuration& cfg) const {
  auto it = index_.find(cfg.id());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ConfigurationSpace::require_index(const Configuration& cfg) const {
  auto idx = index_of(cfg);
  if (!idx) throw Error("configuration " + cfg.id() + " is not in the configuration space");
  return *idx;
}

const Branch& ConfigurationSpace::branch(std::string_view id) const {
  for (const auto& b : branches_) {
    if (b.id == id) return b;
  }
  throw Error("unknown branch '" + std::string(id) + "'");
}

std::vector<SensorModality> ConfigurationSpace::sensors_of(const Configuration& cfg) const {
  std::vector<SensorModality> out;
  for (const auto& id : cfg.branches()) {
    for (auto s : branch(id).inputs) {
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ConfigurationSpace enumerate_configurations(std::vector<Branch> branches,
                                            std::optional<int> max_size) {
  if (branches.empty()) throw Error("empty configuration space");
  if (max_size && *max_size < 1) throw Error("max_size must be >= 1");
  if (branches.size() > 20) throw Error("too many branches to enumerate");

  std::sort(branches.begin(), branches.end(),
            [](const Branch& a, const Branch& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < branches.size(); ++i) {
    if (branches[i].id == branches[i - 1].id) {
      throw ConfigError("duplicate branch id '" + branches[i].id + "'");
    }
  }

  const std::size_t n = branches.size();
  const std::size_t cap = max_size ? static_cast<std::size_t>(*max_size) : n;
  std::vector<Configuration> configs;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) > cap) continue;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) ids.push_back(branches[i].id);
    }
    configs.emplace_back(std::move(ids));
  }
  return ConfigurationSpace(std::move(branches), std::move(configs));
}

ConfigurationSpace make_space(std::vector<Branch> branches, std::vector<Configuration> configs) {
  return ConfigurationSpace(std::move(branches), std::move(configs));
}

std::string_view to_string(ContextLabel l) {
  switch (l) {
    case ContextLabel::city: return "city";
    case ContextLabel::fog: return "fog";
    case ContextLabel::junction: return "junction";
    case ContextLabel::motorway: return "motorway";
    case ContextLabel::night: return "night";
    case ContextLabel::rain: return "rain";
    case ContextLabel::rural: return "rural";
    case ContextLabel::snow: return "snow";
  }
  return "?";
}

std::optional<ContextLabel> parse_label(std::string_view name) {
  for (auto l : kAllLabels) {
    if (to_string(l) == name) return l;
  }
  return std::nullopt;
}

}  // namespace ecofusion
