#include "pdcv/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace pdcv {

namespace {

using nlohmann::json;

const std::set<std::string> kTopKeys{"experiment", "algorithms", "alpha_grid",   "episodes",
                                     "runs",       "base_seed",  "measurement",  "divergence_sentinel"};
const std::set<std::string> kAlgorithmKeys{"variant", "n", "cv_coefficient"};

std::size_t line_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "': wrong type");
  }
}

std::size_t get_count(const json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    throw ConfigError("config key '" + key + "': expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::GridworldOffpolicy: return "gridworld_offpolicy";
    case Experiment::GridworldOnpolicy: return "gridworld_onpolicy";
    case Experiment::MountainCar: return "mountain_car";
  }
  return "unknown";
}

std::string_view to_string(Measurement m) {
  return m == Measurement::RmsAfterFinalEpisode ? "rms_after_final_episode" : "return_per_episode";
}

Experiment parse_experiment(std::string_view name) {
  for (auto e : {Experiment::GridworldOffpolicy, Experiment::GridworldOnpolicy, Experiment::MountainCar}) {
    if (to_string(e) == name) return e;
  }
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

Measurement parse_measurement(std::string_view name) {
  for (auto m : {Measurement::RmsAfterFinalEpisode, Measurement::ReturnPerEpisode}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown measurement '" + std::string(name) + "'");
}

std::string AlgorithmSpec::label() const {
  std::string name(to_string(variant));
  if (variant == Variant::CvSarsa && cv_coefficient != -1.0) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "@c=%.17g", cv_coefficient);
    name += buf;
  }
  return name;
}

std::vector<double> default_alpha_grid() {
  return {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
}

ExperimentConfig ExperimentConfig::defaults(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  c.alpha_grid = default_alpha_grid();
  std::vector<std::size_t> ns{1, 2, 4};
  if (e != Experiment::GridworldOffpolicy) ns.push_back(8);
  for (auto v : {Variant::ExpectedSarsa, Variant::CvSarsa}) {
    for (auto n : ns) c.algorithms.push_back({v, n, -1.0});
  }
  if (e == Experiment::MountainCar) {
    c.episodes = 100;
    c.runs = 100;
    c.measurement = Measurement::ReturnPerEpisode;
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (algorithms.empty()) throw ConfigError("config key 'algorithms': must be nonempty");
  for (const auto& a : algorithms) {
    if (a.n < 1) throw ConfigError("config key 'algorithms.n': must be >= 1");
    if (!std::isfinite(a.cv_coefficient)) throw ConfigError("config key 'algorithms.cv_coefficient': must be finite");
    if (a.variant == Variant::StateCv) {
      throw ConfigError("config key 'algorithms.variant': state_cv is not an action-value learner");
    }
  }
  if (alpha_grid.empty()) throw ConfigError("config key 'alpha_grid': must be nonempty");
  for (double a : alpha_grid) {
    if (!(a > 0.0 && a <= 1.0)) throw ConfigError("config key 'alpha_grid': values must lie in (0,1]");
  }
  if (episodes < 1) throw ConfigError("config key 'episodes': must be >= 1");
  if (runs < 1) throw ConfigError("config key 'runs': must be >= 1");
  if (!(divergence_sentinel > 0.0) || !std::isfinite(divergence_sentinel)) {
    throw ConfigError("config key 'divergence_sentinel': must be positive and finite");
  }
  const bool grid = experiment != Experiment::MountainCar;
  if (grid != (measurement == Measurement::RmsAfterFinalEpisode)) {
    throw ConfigError("config key 'measurement': " + std::string(to_string(measurement)) +
                      " does not apply to " + std::string(to_string(experiment)));
  }
}

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config syntax error at line " + std::to_string(line_of(text, e.byte)) +
                      ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!kTopKeys.contains(key)) throw ConfigError("config: unknown key '" + key + "'");
  }
  for (const char* required : {"experiment", "algorithms", "alpha_grid"}) {
    if (!j.contains(required)) throw ConfigError(std::string("config: missing required key '") + required + "'");
  }

  ExperimentConfig c = ExperimentConfig::defaults(parse_experiment(get_as<std::string>(j["experiment"], "experiment")));
  c.algorithms.clear();
  if (!j["algorithms"].is_array()) throw ConfigError("config key 'algorithms': expected an array");
  for (const auto& a : j["algorithms"]) {
    if (!a.is_object()) throw ConfigError("config key 'algorithms': entries must be objects");
    for (const auto& [key, _] : a.items()) {
      if (!kAlgorithmKeys.contains(key)) throw ConfigError("config: unknown key 'algorithms." + key + "'");
    }
    if (!a.contains("variant")) throw ConfigError("config: missing required key 'algorithms.variant'");
    if (!a.contains("n")) throw ConfigError("config: missing required key 'algorithms.n'");
    AlgorithmSpec spec;
    try {
      spec.variant = parse_variant(get_as<std::string>(a["variant"], "algorithms.variant"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config key 'algorithms.variant': ") + e.what());
    }
    spec.n = get_count(a["n"], "algorithms.n");
    if (a.contains("cv_coefficient")) spec.cv_coefficient = get_as<double>(a["cv_coefficient"], "algorithms.cv_coefficient");
    c.algorithms.push_back(spec);
  }
  if (!j["alpha_grid"].is_array()) throw ConfigError("config key 'alpha_grid': expected an array");
  c.alpha_grid = get_as<std::vector<double>>(j["alpha_grid"], "alpha_grid");
  if (j.contains("episodes")) c.episodes = get_count(j["episodes"], "episodes");
  if (j.contains("runs")) c.runs = get_count(j["runs"], "runs");
  if (j.contains("base_seed")) {
    if (!j["base_seed"].is_number_unsigned()) throw ConfigError("config key 'base_seed': expected a non-negative integer");
    c.base_seed = j["base_seed"].get<std::uint64_t>();
  }
  if (j.contains("measurement")) c.measurement = parse_measurement(get_as<std::string>(j["measurement"], "measurement"));
  if (j.contains("divergence_sentinel")) {
    c.divergence_sentinel = get_as<double>(j["divergence_sentinel"], "divergence_sentinel");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const ExperimentConfig& c) {
  json j;
  j["experiment"] = std::string(to_string(c.experiment));
  j["algorithms"] = json::array();
  for (const auto& a : c.algorithms) {
    j["algorithms"].push_back({{"variant", std::string(to_string(a.variant))},
                               {"n", a.n},
                               {"cv_coefficient", a.cv_coefficient}});
  }
  j["alpha_grid"] = c.alpha_grid;
  j["episodes"] = c.episodes;
  j["runs"] = c.runs;
  j["base_seed"] = c.base_seed;
  j["measurement"] = std::string(to_string(c.measurement));
  j["divergence_sentinel"] = c.divergence_sentinel;
  return j.dump(2) + "\n";
}

}  // namespace pdcv
