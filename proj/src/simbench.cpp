#include "ecofusion/simbench.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "ecofusion/gating.hpp"
#include "ecofusion/kvfile.hpp"

namespace ecofusion {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

// Streams within one (scene, branch) pair.
constexpr std::uint64_t kFalsePositiveCountStream = 1ull << 40;
constexpr std::uint64_t kFalsePositiveStream = (1ull << 40) + 1;
constexpr std::uint64_t kFeatureStream = 1ull << 41;

// Low-skewed confidence of spurious detections.
constexpr double kFpConfidenceAlpha = 1.5;
constexpr double kFpConfidenceBeta = 4.0;
constexpr double kMinObjectSize = 20.0;
constexpr double kMaxObjectSize = 150.0;

double draw_beta(std::mt19937_64& rng, double alpha, double beta) {
  if (beta == 0.0) return 1.0;
  if (alpha == 0.0) return 0.0;
  std::gamma_distribution<double> ga(alpha, 1.0);
  std::gamma_distribution<double> gb(beta, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  if (x + y <= 0.0) return 0.5;
  return std::clamp(x / (x + y), 0.0, 1.0);
}

BoundingBox random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> size(kMinObjectSize, kMaxObjectSize);
  const double w = size(rng);
  const double h = size(rng);
  std::uniform_real_distribution<double> px(0.0, kFrameSize - w);
  std::uniform_real_distribution<double> py(0.0, kFrameSize - h);
  const double x = px(rng);
  const double y = py(rng);
  return BoundingBox{x, y, x + w, y + h};
}

// Keeps a perturbed box non-degenerate.
BoundingBox repair(double x1, double y1, double x2, double y2) {
  if (x1 > x2) std::swap(x1, x2);
  if (y1 > y2) std::swap(y1, y2);
  if (x2 - x1 < 1.0) x2 = x1 + 1.0;
  if (y2 - y1 < 1.0) y2 = y1 + 1.0;
  return BoundingBox{x1, y1, x2, y2};
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t scene_seed, std::string_view branch_id, std::uint64_t counter) {
  return splitmix64(splitmix64(scene_seed ^ fnv1a(branch_id)) + splitmix64(counter));
}

std::uint64_t scene_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x5CE7E5ull));
}

// ---------------------------------------------------------------------------

void BranchQuality::validate() const {
  const bool ok = miss_rate >= 0.0 && miss_rate <= 1.0 && fp_rate >= 0.0 && box_noise_sigma >= 0.0 &&
                  confidence_alpha >= 0.0 && confidence_beta >= 0.0 &&
                  (confidence_alpha > 0.0 || confidence_beta > 0.0) && std::isfinite(fp_rate) &&
                  std::isfinite(box_noise_sigma) && std::isfinite(confidence_alpha) &&
                  std::isfinite(confidence_beta);
  if (!ok) throw ConfigError("invalid branch quality parameters");
}

void QualityMatrix::set(ContextLabel label, std::string branch, BranchQuality q) {
  q.validate();
  entries_[{label, std::move(branch)}] = q;
}

const BranchQuality& QualityMatrix::at(ContextLabel label, std::string_view branch) const {
  auto it = entries_.find(std::pair<ContextLabel, std::string>{label, std::string(branch)});
  if (it == entries_.end()) {
    throw Error("no quality entry for (" + std::string(to_string(label)) + ", " + std::string(branch) + ")");
  }
  return it->second;
}

bool QualityMatrix::contains(ContextLabel label, std::string_view branch) const {
  return entries_.contains(std::pair<ContextLabel, std::string>{label, std::string(branch)});
}

void QualityMatrix::require_complete(std::span<const ContextLabel> labels,
                                     std::span<const Branch> branches) const {
  for (auto l : labels) {
    for (const auto& b : branches) {
      if (!contains(l, b.id)) {
        throw ConfigError("quality matrix lacks (" + std::string(to_string(l)) + ", " + b.id + ")");
      }
    }
  }
}

QualityMatrix QualityMatrix::parse(std::string_view text, const std::string& origin) {
  QualityMatrix q;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto words = split_words(line);
    if (words.empty()) continue;
    const auto at = origin + ":" + std::to_string(lineno);
    if (words.size() != 7) throw ConfigError(at + ": expected 7 columns, got " + std::to_string(words.size()));
    auto label = parse_label(words[0]);
    if (!label) throw ConfigError(at + ": unknown context label '" + words[0] + "'");
    BranchQuality bq{parse_double(words[2], at + " miss_rate"), parse_double(words[3], at + " fp_rate"),
                     parse_double(words[4], at + " box_noise_sigma"),
                     parse_double(words[5], at + " confidence_alpha"),
                     parse_double(words[6], at + " confidence_beta")};
    try {
      bq.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(at + ": " + e.what());
    }
    if (q.contains(*label, words[1])) throw ConfigError(at + ": duplicate entry");
    q.set(*label, words[1], bq);
  }
  return q;
}

QualityMatrix QualityMatrix::load(const std::filesystem::path& path) {
  return parse(read_text_file(path), path.string());
}

std::string QualityMatrix::serialize() const {
  std::string out = "# label branch miss_rate fp_rate box_noise_sigma confidence_alpha confidence_beta\n";
  for (const auto& [key, q] : entries_) {
    out += std::string(to_string(key.first)) + " " + key.second + " " + format_double(q.miss_rate) + " " +
           format_double(q.fp_rate) + " " + format_double(q.box_noise_sigma) + " " +
           format_double(q.confidence_alpha) + " " + format_double(q.confidence_beta) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> extract_context_features(ContextLabel label, std::uint64_t seed) {
  std::mt19937_64 rng(stream_seed(seed, "stem", kFeatureStream));
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<double> f(kContextFeatureDim);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = (i == static_cast<std::size_t>(label) ? 1.0 : 0.0) + noise(rng);
  }
  return f;
}

Scene generate_scene(ContextLabel label, ObjectCountRange range, std::uint64_t seed, int id) {
  if (range.min < 0 || range.max < range.min) throw Error("object count range is empty");
  std::mt19937_64 rng(splitmix64(seed));
  Scene s;
  s.id = id;
  s.seed = seed;
  s.context = Context{label, extract_context_features(label, seed)};
  const int n = std::uniform_int_distribution<int>(range.min, range.max)(rng);
  std::uniform_int_distribution<int> cls(0, num_object_classes() - 1);
  s.objects.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int c = cls(rng);
    s.objects.push_back(GroundTruthObject{c, random_box(rng)});
  }
  return s;
}

std::vector<Scene> generate_benchmark(const BenchmarkSpec& spec) {
  if (spec.labels.empty()) throw ConfigError("benchmark declares no context labels");
  if (spec.scenes_per_label < 0) throw ConfigError("scenes_per_label must be non-negative");
  std::vector<Scene> scenes;
  int id = 0;
  for (auto label : spec.labels) {
    for (int i = 0; i < spec.scenes_per_label; ++i, ++id) {
      scenes.push_back(
          generate_scene(label, spec.objects, scene_seed(spec.seed, static_cast<std::uint64_t>(id)), id));
    }
  }
  return scenes;
}

std::string serialize_scenes(std::span<const Scene> scenes) {
  std::string out = "# ecofusion scene set\n";
  for (const auto& s : scenes) {
    out += "scene " + std::to_string(s.id) + " " + std::string(to_string(s.context.label)) + " " +
           std::to_string(s.seed) + " " + std::to_string(s.objects.size()) + "\n";
    out += "feature";
    for (double v : s.context.feature) out += " " + format_double(v);
    out += "\n";
    for (const auto& o : s.objects) {
      out += "object " + std::to_string(o.cls) + " " + format_double(o.box.x1) + " " +
             format_double(o.box.y1) + " " + format_double(o.box.x2) + " " + format_double(o.box.y2) + "\n";
    }
  }
  return out;
}

std::vector<Scene> parse_scenes(std::string_view text, const std::string& origin) {
  std::vector<Scene> scenes;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  std::size_t pending_objects = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto w = split_words(line);
    if (w.empty()) continue;
    const auto at = origin + ":" + std::to_string(lineno);
    if (w[0] == "scene") {
      if (pending_objects != 0) throw ConfigError(at + ": previous scene is missing objects");
      if (w.size() != 5) throw ConfigError(at + ": malformed scene header");
      Scene s;
      s.id = static_cast<int>(parse_int(w[1], at));
      auto label = parse_label(w[2]);
      if (!label) throw ConfigError(at + ": unknown label '" + w[2] + "'");
      s.context.label = *label;
      s.seed = std::stoull(w[3]);
      pending_objects = static_cast<std::size_t>(parse_int(w[4], at));
      scenes.push_back(std::move(s));
    } else if (w[0] == "feature") {
      if (scenes.empty()) throw ConfigError(at + ": feature before scene");
      for (std::size_t i = 1; i < w.size(); ++i) scenes.back().context.feature.push_back(parse_double(w[i], at));
    } else if (w[0] == "object") {
      if (scenes.empty() || pending_objects == 0) throw ConfigError(at + ": unexpected object line");
      if (w.size() != 6) throw ConfigError(at + ": malformed object line");
      GroundTruthObject o{static_cast<int>(parse_int(w[1], at)),
                          BoundingBox{parse_double(w[2], at), parse_double(w[3], at),
                                      parse_double(w[4], at), parse_double(w[5], at)}};
      if (!o.box.valid()) throw ConfigError(at + ": invalid box");
      scenes.back().objects.push_back(o);
      --pending_objects;
    } else {
      throw ConfigError(at + ": unknown record '" + w[0] + "'");
    }
  }
  if (pending_objects != 0) throw ConfigError(origin + ": truncated scene set");
  return scenes;
}

// ---------------------------------------------------------------------------

std::vector<Detection> simulate_branch(const Branch& branch, const Scene& scene,
                                       const QualityMatrix& quality) {
  const auto& q = quality.at(scene.context.label, branch.id);
  std::vector<Detection> out;

  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    std::mt19937_64 rng(stream_seed(scene.seed, branch.id, i));
    const auto& gt = scene.objects[i];
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const bool detected = u(rng) >= q.miss_rate;
    // fixed draw count per object keeps the stream layout independent of the outcome
    std::normal_distribution<double> n01(0.0, 1.0);
    double eps[4];
    for (double& e : eps) e = n01(rng);
    const double conf = draw_beta(rng, q.confidence_alpha, q.confidence_beta);
    if (!detected) continue;

    const double sx = q.box_noise_sigma * gt.box.width();
    const double sy = q.box_noise_sigma * gt.box.height();
    out.push_back(Detection{gt.cls,
                            repair(gt.box.x1 + sx * eps[0], gt.box.y1 + sy * eps[1],
                                   gt.box.x2 + sx * eps[2], gt.box.y2 + sy * eps[3]),
                            conf, branch.id});
  }

  std::mt19937_64 count_rng(stream_seed(scene.seed, branch.id, kFalsePositiveCountStream));
  const int n_fp = q.fp_rate > 0.0 ? std::poisson_distribution<int>(q.fp_rate)(count_rng) : 0;
  for (int k = 0; k < n_fp; ++k) {
    std::mt19937_64 rng(stream_seed(scene.seed, branch.id, kFalsePositiveStream + static_cast<std::uint64_t>(k)));
    const int cls = std::uniform_int_distribution<int>(0, num_object_classes() - 1)(rng);
    const auto box = random_box(rng);
    const double conf = draw_beta(rng, kFpConfidenceAlpha, kFpConfidenceBeta);
    out.push_back(Detection{cls, box, conf, branch.id});
  }
  return out;
}

Simulator::Simulator(ConfigurationSpace space, QualityMatrix quality, FusionParams fusion,
                     LossWeights loss)
    : space_(std::move(space)), quality_(std::move(quality)), fusion_(fusion), loss_(loss) {
  fusion_.validate();
  loss_.validate();
}

BranchOutputs Simulator::simulate_all(const Scene& scene) const {
  BranchOutputs out;
  out.reserve(space_.branches().size());
  for (const auto& b : space_.branches()) out.push_back(simulate_branch(b, scene, quality_));
  return out;
}

std::vector<Detection> Simulator::execute(const Configuration& cfg, const BranchOutputs& outputs) const {
  const auto branches = space_.branches();
  std::vector<std::vector<Detection>> lists;
  lists.reserve(cfg.size());
  for (const auto& id : cfg.branches()) {
    auto it = std::find_if(branches.begin(), branches.end(), [&](const Branch& b) { return b.id == id; });
    if (it == branches.end()) throw Error("unknown branch '" + id + "'");
    lists.push_back(outputs.at(static_cast<std::size_t>(it - branches.begin())));
  }
  if (lists.size() == 1) return std::move(lists.front());
  auto params = fusion_;
  params.num_sources = static_cast<int>(cfg.size());
  return weighted_box_fusion(lists, params);
}

std::vector<Detection> Simulator::execute(const Configuration& cfg, const Scene& scene) const {
  BranchOutputs outputs;
  for (const auto& b : space_.branches()) {
    outputs.push_back(cfg.contains(b.id) ? simulate_branch(b, scene, quality_) : std::vector<Detection>{});
  }
  return execute(cfg, outputs);
}

double Simulator::realized_loss(const Configuration& cfg, const Scene& scene,
                                const BranchOutputs& outputs) const {
  const auto dets = execute(cfg, outputs);
  return mean_detection_loss(dets, scene.objects, loss_);
}

// ---------------------------------------------------------------------------

std::vector<double> space_energies(const ConfigurationSpace& space, const EnergyProfile& profile) {
  std::vector<double> e;
  e.reserve(space.size());
  for (const auto& cfg : space.configs()) e.push_back(config_energy(cfg, profile).energy_j);
  return e;
}

namespace {

PipelineResult realize(const Scene& scene, const Configuration& cfg, const Simulator& sim,
                       const EnergyProfile& profile, const BranchOutputs& outputs) {
  PipelineResult r;
  r.scene_id = scene.id;
  r.label = scene.context.label;
  r.chosen = cfg;
  r.detections = sim.execute(cfg, outputs);
  r.realized_loss = mean_detection_loss(r.detections, scene.objects, sim.loss_weights());
  const auto cost = config_energy(cfg, profile);
  r.energy_j = cost.energy_j;
  r.latency_s = cost.latency_s;
  return r;
}

}  // namespace

std::vector<PipelineResult> run_pipeline_sweep(const Scene& scene, const GatePolicy& gate,
                                               const Simulator& sim, const EnergyProfile& profile,
                                               double gamma, std::span<const double> lambdas,
                                               double energy_scale) {
  const auto& space = sim.space();
  // stems run on every frame; the gate consumes their features
  const auto estimates = gate.estimate(scene, space);
  if (estimates.size() != space.size()) throw Error("gate returned an incomplete loss table");
  const auto energies = space_energies(space, profile);
  const auto outputs = sim.simulate_all(scene);

  std::vector<PipelineResult> out;
  out.reserve(lambdas.size());
  for (double lam : lambdas) {
    const OptimizerParams params{gamma, lam, energy_scale};
    auto sel = select_configuration(estimates.values, energies, params);
    auto r = realize(scene, space[sel.chosen], sim, profile, outputs);
    r.estimated_loss = estimates[sel.chosen];
    r.selection = std::move(sel);
    out.push_back(std::move(r));
  }
  return out;
}

PipelineResult run_pipeline(const Scene& scene, const GatePolicy& gate, const Simulator& sim,
                            const EnergyProfile& profile, const OptimizerParams& params) {
  params.validate();
  const double lam[] = {params.lambda_e};
  return std::move(run_pipeline_sweep(scene, gate, sim, profile, params.gamma, lam, params.energy_scale).front());
}

PipelineResult run_static(const Scene& scene, const Configuration& cfg, const Simulator& sim,
                          const EnergyProfile& profile) {
  BranchOutputs outputs;
  for (const auto& b : sim.space().branches()) {
    outputs.push_back(cfg.contains(b.id) ? simulate_branch(b, scene, sim.quality()) : std::vector<Detection>{});
  }
  return realize(scene, cfg, sim, profile, outputs);
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ecofusion
