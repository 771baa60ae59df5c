#include "hexflow/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "hexflow/error.hpp"

namespace hexflow {

namespace {

using nlohmann::json;

// Wraps nlohmann type errors into the config error the CLI maps to exit 3.
template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  try {
    return j.value(key, fallback);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void parse_synth(const json& j, SynthConfig& out) {
  out.n_users = get_or(j, "n_users", out.n_users);
  out.n_days = get_or(j, "n_days", out.n_days);
  out.n_home_cells = get_or(j, "n_home_cells", out.n_home_cells);
  out.daily_period_strength =
      get_or(j, "daily_period_strength", out.daily_period_strength);
  out.sparsity = get_or(j, "sparsity", out.sparsity);
  out.noise_std = get_or(j, "noise_std", out.noise_std);
  out.seed = get_or(j, "seed", out.seed);
  out.work_clusters = get_or(j, "work_clusters", out.work_clusters);
}

void parse_grid(const json& j, GridConfig& out) {
  out.anchor_lat = get_or(j, "anchor_lat", out.anchor_lat);
  out.anchor_lon = get_or(j, "anchor_lon", out.anchor_lon);
  out.edge_length_m = get_or(j, "edge_length_m", out.edge_length_m);
}

void parse_stops(const json& j, StopParams& out) {
  out.radius_m = get_or(j, "radius_m", out.radius_m);
  out.max_gap_s = get_or(j, "max_gap_s", out.max_gap_s);
  out.min_duration_s = get_or(j, "min_duration_s", out.min_duration_s);
}

void parse_mask(const json& j, MaskConfig& out) {
  out.enabled = get_or(j, "enabled", out.enabled);
  out.tau = get_or(j, "tau", out.tau);
  out.bandwidth_m = get_or(j, "bandwidth_m", out.bandwidth_m);
  out.cutoff = get_or(j, "cutoff", out.cutoff);
}

void parse_train(const json& j, TrainConfig& out) {
  out.lr = get_or(j, "lr", out.lr);
  out.batch = get_or(j, "batch", out.batch);
  out.max_epochs = get_or(j, "max_epochs", out.max_epochs);
  out.patience = get_or(j, "patience", out.patience);
  out.beta1 = get_or(j, "beta1", out.beta1);
  out.beta2 = get_or(j, "beta2", out.beta2);
  out.eps = get_or(j, "eps", out.eps);
}

void parse_splits(const json& j, WindowSpec& out) {
  out.train_frac = get_or(j, "train_frac", out.train_frac);
  out.val_frac = get_or(j, "val_frac", out.val_frac);
  out.test_frac = get_or(j, "test_frac", out.test_frac);
}

void parse_benchmark(const json& j, BenchmarkConfig& out) {
  if (j.contains("models")) {
    out.models.clear();
    for (const auto& name : j.at("models")) {
      const auto kind = parse_model_kind(name.get<std::string>());
      if (!kind)
        throw ConfigError("unknown model: " + name.get<std::string>());
      out.models.push_back(*kind);
    }
  }
  if (j.contains("lookbacks"))
    out.lookbacks = j.at("lookbacks").get<std::vector<int>>();
  if (j.contains("seeds"))
    out.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  out.horizon = get_or(j, "horizon", out.horizon);
  out.hidden = get_or(j, "hidden", out.hidden);
  out.patch_len = get_or(j, "patch_len", out.patch_len);
  out.threads = get_or(j, "threads", out.threads);
  if (j.contains("train")) parse_train(j.at("train"), out.train);
  if (j.contains("splits")) parse_splits(j.at("splits"), out.splits);
}

}  // namespace

void PipelineConfig::validate() const {
  synth.validate();
  stops.validate();
  if (min_records < 1) throw ConfigError("min_records must be at least 1");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ConfigError("alpha must lie in [0, 1]");
  if (mask.tau < 0.0) throw ConfigError("mask tau must be nonnegative");
  if (mask.bandwidth_m < 0.0)
    throw ConfigError("mask bandwidth must be nonnegative");
  if (!(mask.cutoff > 0.0 && mask.cutoff <= 1.0))
    throw ConfigError("mask cutoff must lie in (0, 1]");
  benchmark.validate();
}

PipelineConfig parse_pipeline_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  PipelineConfig cfg;
  try {
    if (j.contains("synth")) parse_synth(j.at("synth"), cfg.synth);
    if (j.contains("grid")) parse_grid(j.at("grid"), cfg.synth.grid);
    if (j.contains("stops")) parse_stops(j.at("stops"), cfg.stops);
    if (j.contains("ingest"))
      cfg.min_records = get_or(j.at("ingest"), "min_records", cfg.min_records);
    if (j.contains("spn"))
      cfg.alpha = get_or(j.at("spn"), "alpha", cfg.alpha);
    if (j.contains("mask")) parse_mask(j.at("mask"), cfg.mask);
    if (j.contains("benchmark"))
      parse_benchmark(j.at("benchmark"), cfg.benchmark);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pipeline_config(buf.str());
}

}  // namespace hexflow
