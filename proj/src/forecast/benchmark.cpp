#include "hexflow/forecast/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <thread>

#include "hexflow/csv.hpp"
#include "hexflow/error.hpp"

namespace hexflow {

void BenchmarkConfig::validate() const {
  if (models.empty()) throw ConfigError("benchmark needs at least one model");
  if (lookbacks.empty())
    throw ConfigError("benchmark needs at least one lookback");
  if (seeds.empty()) throw ConfigError("benchmark needs at least one seed");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (threads < 1) throw ConfigError("thread count must be at least 1");
  for (const int lb : lookbacks)
    if (lb < 1) throw ConfigError("lookbacks must be at least 1");
  train.validate();
  splits.validate();
}

std::pair<Dataset, Dataset> build_datasets(const FeatureTensor& tensor,
                                           const WindowSpec& splits) {
  Dataset spn_ds;
  spn_ds.channels = {tensor.raw, tensor.med, tensor.mean};
  spn_ds.target = smooth_target(tensor.raw, tensor.med, tensor.alpha);
  spn_ds.cells = tensor.cells;
  spn_ds.start_hour = tensor.start_hour;

  Dataset vanilla = spn_ds;
  vanilla.channels = {tensor.raw};

  const auto [b1, b2] = split_boundaries(spn_ds.hours(), splits);
  (void)b2;
  const Standardizer st3 = Standardizer::fit(spn_ds, b1);
  const Standardizer st1 = Standardizer::fit(vanilla, b1);
  return {st1.apply(vanilla), st3.apply(spn_ds)};
}

namespace {

struct RunSpec {
  ModelKind model;
  bool spn;
  int lookback;
  std::uint64_t seed;
};

RunResult execute_run(const RunSpec& spec, const Dataset& ds,
                      const BenchmarkConfig& cfg) {
  WindowSpec wspec = cfg.splits;
  wspec.lookback = spec.lookback;
  wspec.horizon = cfg.horizon;
  const WindowSet windows = make_windows(ds.hours(), wspec);

  const WindowBatcher train_b(ds, windows.train, spec.lookback, cfg.horizon);
  const WindowBatcher val_b(ds, windows.val, spec.lookback, cfg.horizon);
  const WindowBatcher test_b(ds, windows.test, spec.lookback, cfg.horizon);

  ModelConfig mcfg;
  mcfg.kind = spec.model;
  mcfg.lookback = spec.lookback;
  mcfg.horizon = cfg.horizon;
  mcfg.channels = spec.spn ? 3 : 1;
  mcfg.hidden = cfg.hidden;
  mcfg.patch_len = cfg.patch_len;
  auto model = make_backbone(mcfg);

  const auto t0 = std::chrono::steady_clock::now();
  const TrainResult tr = train(*model, train_b, val_b, cfg.train, spec.seed);
  const auto t1 = std::chrono::steady_clock::now();

  RunResult r;
  r.model = spec.model;
  r.spn = spec.spn;
  r.lookback = spec.lookback;
  r.horizon = cfg.horizon;
  r.seed = spec.seed;
  r.train_mse = evaluate(*model, train_b);
  r.val_mse = tr.best_val_mse;
  r.test_mse = evaluate(*model, test_b);
  r.epochs = tr.epochs_run;
  r.wall_clock_s = std::chrono::duration<double>(t1 - t0).count();
  return r;
}

}  // namespace

std::vector<RunResult> run_benchmark(const FeatureTensor& tensor,
                                     const BenchmarkConfig& cfg,
                                     std::ostream* progress) {
  cfg.validate();
  const auto built = build_datasets(tensor, cfg.splits);
  const Dataset& vanilla = built.first;
  const Dataset& spn_ds = built.second;

  std::vector<RunSpec> specs;
  for (ModelKind kind : cfg.models)
    for (int variant = 0; variant < 2; ++variant)
      for (int lookback : cfg.lookbacks)
        for (std::uint64_t seed : cfg.seeds)
          specs.push_back(RunSpec{kind, variant == 1, lookback, seed});

  std::vector<RunResult> results(specs.size());
  std::mutex progress_mutex;
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) return;
      const Dataset& ds = specs[i].spn ? spn_ds : vanilla;
      results[i] = execute_run(specs[i], ds, cfg);
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        *progress << "run " << (i + 1) << "/" << specs.size() << ": "
                  << to_string(results[i].model)
                  << (results[i].spn ? "+spn" : "") << " L="
                  << results[i].lookback << " seed=" << results[i].seed
                  << " test_mse=" << results[i].test_mse << " epochs="
                  << results[i].epochs << "\n";
      }
    }
  };

  if (cfg.threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < cfg.threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return results;
}

double improvement_pct(double vanilla_mse, double spn_mse) {
  return 100.0 * (vanilla_mse - spn_mse) / vanilla_mse;
}

namespace {

struct MeanStd {
  double mean = 0.0;
  double stdev = 0.0;
  int n = 0;
};

MeanStd seed_stats(const std::vector<RunResult>& results, ModelKind kind,
                   bool spn, int lookback, bool use_test) {
  MeanStd ms;
  double sum = 0.0;
  std::vector<double> vals;
  for (const RunResult& r : results) {
    if (r.model != kind || r.spn != spn || r.lookback != lookback) continue;
    const double v = use_test ? r.test_mse : r.train_mse;
    vals.push_back(v);
    sum += v;
  }
  ms.n = static_cast<int>(vals.size());
  if (ms.n == 0) return ms;
  ms.mean = sum / ms.n;
  double sq = 0.0;
  for (double v : vals) sq += (v - ms.mean) * (v - ms.mean);
  ms.stdev = std::sqrt(sq / ms.n);
  return ms;
}

std::vector<int> lookbacks_present(const std::vector<RunResult>& results) {
  std::vector<int> ls;
  for (const RunResult& r : results)
    if (std::find(ls.begin(), ls.end(), r.lookback) == ls.end())
      ls.push_back(r.lookback);
  return ls;
}

std::vector<ModelKind> models_present(const std::vector<RunResult>& results) {
  std::vector<ModelKind> ms;
  for (const RunResult& r : results)
    if (std::find(ms.begin(), ms.end(), r.model) == ms.end())
      ms.push_back(r.model);
  return ms;
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

double avg_improvement_pct(const std::vector<RunResult>& results,
                           ModelKind kind, bool use_test) {
  double sum = 0.0;
  int n = 0;
  for (int lookback : lookbacks_present(results)) {
    const MeanStd vanilla = seed_stats(results, kind, false, lookback, use_test);
    const MeanStd spn = seed_stats(results, kind, true, lookback, use_test);
    if (vanilla.n == 0 || spn.n == 0) continue;
    sum += improvement_pct(vanilla.mean, spn.mean);
    ++n;
  }
  if (n == 0) throw DataError("no paired runs to compute improvement from");
  return sum / n;
}

void write_results_csv(std::ostream& out,
                       const std::vector<RunResult>& results) {
  out << "model,spn,L,T,seed,train_mse,val_mse,test_mse,epochs,wall_clock_s\n";
  for (const RunResult& r : results) {
    out << to_string(r.model) << ',' << (r.spn ? 1 : 0) << ',' << r.lookback
        << ',' << r.horizon << ',' << r.seed << ','
        << format_double(r.train_mse) << ',' << format_double(r.val_mse)
        << ',' << format_double(r.test_mse) << ',' << r.epochs << ','
        << format_double(r.wall_clock_s) << '\n';
  }
}

std::vector<RunResult> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty results file");
  chomp_cr(line);
  if (line !=
      "model,spn,L,T,seed,train_mse,val_mse,test_mse,epochs,wall_clock_s")
    throw InputError("unexpected results header: " + line);

  std::vector<RunResult> results;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    chomp_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 10)
      throw InputError("results line " + std::to_string(line_no) +
                       ": expected 10 fields");
    const auto model = parse_model_kind(fields[0]);
    const auto spn = parse_int(fields[1]);
    const auto lookback = parse_int(fields[2]);
    const auto horizon = parse_int(fields[3]);
    const auto seed = parse_int(fields[4]);
    const auto train_mse = parse_double(fields[5]);
    const auto val_mse = parse_double(fields[6]);
    const auto test_mse = parse_double(fields[7]);
    const auto epochs = parse_int(fields[8]);
    const auto wall = parse_double(fields[9]);
    if (!model || !spn || !lookback || !horizon || !seed || !train_mse ||
        !val_mse || !test_mse || !epochs || !wall)
      throw InputError("results line " + std::to_string(line_no) +
                       ": bad field");
    RunResult r;
    r.model = *model;
    r.spn = *spn != 0;
    r.lookback = static_cast<int>(*lookback);
    r.horizon = static_cast<int>(*horizon);
    r.seed = static_cast<std::uint64_t>(*seed);
    r.train_mse = *train_mse;
    r.val_mse = *val_mse;
    r.test_mse = *test_mse;
    r.epochs = static_cast<int>(*epochs);
    r.wall_clock_s = *wall;
    results.push_back(r);
  }
  return results;
}

void write_summary_csv(std::ostream& out,
                       const std::vector<RunResult>& results) {
  const std::vector<ModelKind> models = models_present(results);
  const std::vector<int> lookbacks = lookbacks_present(results);

  out << "metric,L";
  for (ModelKind kind : models)
    out << ',' << to_string(kind) << ',' << to_string(kind) << "+spn";
  out << '\n';

  for (const bool use_test : {false, true}) {
    const char* metric = use_test ? "test" : "train";
    for (int lookback : lookbacks) {
      out << metric << ',' << lookback;
      for (ModelKind kind : models) {
        for (const bool spn : {false, true}) {
          const MeanStd ms = seed_stats(results, kind, spn, lookback, use_test);
          out << ',' << fixed4(ms.mean) << "±" << fixed4(ms.stdev);
        }
      }
      out << '\n';
    }
    out << metric << ",avg_imp_pct";
    for (ModelKind kind : models)
      out << ",," << fixed4(avg_improvement_pct(results, kind, use_test));
    out << '\n';
  }
}

void dump_predictions(const FeatureTensor& tensor, const BenchmarkConfig& cfg,
                      ModelKind kind, bool spn, int lookback,
                      std::uint64_t seed, std::ostream& out) {
  cfg.validate();
  const auto built = build_datasets(tensor, cfg.splits);
  const Dataset& ds = spn ? built.second : built.first;

  WindowSpec wspec = cfg.splits;
  wspec.lookback = lookback;
  wspec.horizon = cfg.horizon;
  const WindowSet windows = make_windows(ds.hours(), wspec);
  const WindowBatcher train_b(ds, windows.train, lookback, cfg.horizon);
  const WindowBatcher val_b(ds, windows.val, lookback, cfg.horizon);
  const WindowBatcher test_b(ds, windows.test, lookback, cfg.horizon);

  ModelConfig mcfg;
  mcfg.kind = kind;
  mcfg.lookback = lookback;
  mcfg.horizon = cfg.horizon;
  mcfg.channels = spn ? 3 : 1;
  mcfg.hidden = cfg.hidden;
  mcfg.patch_len = cfg.patch_len;
  auto model = make_backbone(mcfg);
  train(*model, train_b, val_b, cfg.train, seed);

  // ds is already standardized; refit channel-0 statistics on the raw
  // tensor to undo the target scaling in the dump.
  Dataset unscaled;
  unscaled.channels = {tensor.raw};
  unscaled.target = smooth_target(tensor.raw, tensor.med, tensor.alpha);
  unscaled.cells = tensor.cells;
  unscaled.start_hour = tensor.start_hour;
  const auto [b1, b2] = split_boundaries(unscaled.hours(), cfg.splits);
  (void)b2;
  const Standardizer st = Standardizer::fit(unscaled, b1);

  const std::string label =
      std::string(to_string(kind)) + (spn ? "+spn" : "");
  out << "hour_index,cell,y_true,y_pred,model\n";
  std::vector<std::size_t> ids(test_b.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  std::vector<Eigen::MatrixXd> x;
  Eigen::MatrixXd y;
  const std::size_t chunk = 1024;
  for (std::size_t i = 0; i < ids.size(); i += chunk) {
    const std::size_t count = std::min(chunk, ids.size() - i);
    test_b.gather(ids, i, count, x, y);
    const Eigen::MatrixXd pred = model->forward(x);
    for (std::size_t j = 0; j < count; ++j) {
      const std::size_t id = ids[i + j];
      const int s = test_b.window_start(id);
      const Eigen::Index m = test_b.cell(id);
      for (int h = 0; h < cfg.horizon; ++h) {
        out << (ds.start_hour + s + h) << ',' << ds.cells[m].str() << ','
            << format_double(st.destandardize_target(y(h, j), m)) << ','
            << format_double(st.destandardize_target(pred(h, j), m)) << ','
            << label << '\n';
      }
    }
  }
}

}  // namespace hexflow
