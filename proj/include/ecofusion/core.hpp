#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ecofusion {

/// Runtime failure inside the library (bad arguments, missing entries).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration/calibration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Object classes

struct ObjectClass {
  int id = 0;
  std::string name;
};

/// The eight annotated classes, ids dense from 0.
const std::vector<ObjectClass>& object_classes();
int num_object_classes();
const std::string& class_name(int id);

// ---------------------------------------------------------------------------
// Geometry and detections

struct BoundingBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  bool valid() const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Throws Error unless x1 < x2, y1 < y2 and all coordinates are finite.
BoundingBox make_box(double x1, double y1, double x2, double y2);

struct GroundTruthObject {
  int cls = 0;
  BoundingBox box;

  friend bool operator==(const GroundTruthObject&, const GroundTruthObject&) = default;
};

struct Detection {
  int cls = 0;
  BoundingBox box;
  double confidence = 0.0;
  std::string source;  // branch id

  friend bool operator==(const Detection&, const Detection&) = default;
};

// ---------------------------------------------------------------------------
// Sensors and branches

enum class SensorModality : std::uint8_t { camera_left, camera_right, lidar, radar };

inline constexpr std::array<SensorModality, 4> kAllSensors = {
    SensorModality::camera_left, SensorModality::camera_right, SensorModality::lidar,
    SensorModality::radar};

std::string_view to_string(SensorModality s);
std::optional<SensorModality> parse_sensor(std::string_view name);

enum class BranchKind : std::uint8_t { single, early_fusion };

std::string_view to_string(BranchKind k);

struct Branch {
  std::string id;
  std::vector<SensorModality> inputs;  // sorted, unique
  BranchKind kind = BranchKind::single;
};

/// Builds a branch, sorting/deduplicating inputs and deriving its kind.
Branch make_branch(std::string id, std::vector<SensorModality> inputs);

// ---------------------------------------------------------------------------
// Configurations

/// An ensemble of branches. Identity is set identity: ids are kept sorted and unique.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<std::string> branch_ids);

  /// Parses "a+b+c".
  static Configuration parse(std::string_view text);

  const std::vector<std::string>& branches() const { return branches_; }
  std::size_t size() const { return branches_.size(); }
  bool contains(std::string_view branch_id) const;

  /// Branch ids joined with '+', in sorted order.
  std::string id() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<std::string> branches_;
};

/// Canonical order: by size, then lexicographic over the sorted branch ids.
bool canonical_less(const Configuration& a, const Configuration& b);

/// The configuration list Φ in canonical order, with the branch declarations it refers to.
class ConfigurationSpace {
 public:
  ConfigurationSpace(std::vector<Branch> branches, std::vector<Configuration> configs);

  std::span<const Configuration> configs() const { return configs_; }
  std::span<const Branch> branches() const { return branches_; }
  std::size_t size() const { return configs_.size(); }
  const Configuration& operator[](std::size_t i) const { return configs_[i]; }

  std::optional<std::size_t> index_of(const Configuration& cfg) const;
  std::size_t require_index(const Configuration& cfg) const;
  const Branch& branch(std::string_view id) const;

  /// Sensors read by at least one branch of cfg, in declaration order.
  std::vector<SensorModality> sensors_of(const Configuration& cfg) const;

 private:
  std::vector<Branch> branches_;
  std::vector<Configuration> configs_;
  std::map<std::string, std::size_t> index_;
};

/// All non-empty branch subsets with |φ| <= max_size, canonically ordered.
ConfigurationSpace enumerate_configurations(std::vector<Branch> branches,
                                            std::optional<int> max_size = std::nullopt);

/// Restricts a space to the given configurations (each must be a subset of declared branches).
ConfigurationSpace make_space(std::vector<Branch> branches, std::vector<Configuration> configs);

// ---------------------------------------------------------------------------
// Driving context

enum class ContextLabel : std::uint8_t { city, fog, junction, motorway, night, rain, rural, snow };

inline constexpr std::array<ContextLabel, 8> kAllLabels = {
    ContextLabel::city,  ContextLabel::fog,  ContextLabel::junction, ContextLabel::motorway,
    ContextLabel::night, ContextLabel::rain, ContextLabel::rural,    ContextLabel::snow};

std::string_view to_string(ContextLabel l);
std::optional<ContextLabel> parse_label(std::string_view name);

inline constexpr std::size_t kContextFeatureDim = kAllLabels.size();

struct Context {
  ContextLabel label = ContextLabel::city;
  std::vector<double> feature;  // stem output stub, length kContextFeatureDim
};

}  // namespace ecofusion
