#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <vector>

#include "hexflow/forecast/train.hpp"
#include "hexflow/forecast/windows.hpp"
#include "hexflow/spn.hpp"

namespace hexflow {

struct BenchmarkConfig {
  std::vector<ModelKind> models{ModelKind::kNLinear, ModelKind::kMlp,
                                ModelKind::kPatchMini};
  std::vector<int> lookbacks{48, 72, 96, 120};
  int horizon = 48;
  int hidden = 128;
  int patch_len = 4;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  TrainConfig train;
  WindowSpec splits;  // lookback/horizon fields are overridden per run
  int threads = 1;

  void validate() const;  // throws ConfigError
};

struct RunResult {
  ModelKind model = ModelKind::kNLinear;
  bool spn = false;
  int lookback = 0;
  int horizon = 0;
  std::uint64_t seed = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;
  double test_mse = 0.0;
  int epochs = 0;
  double wall_clock_s = 0.0;
};

// Standardized vanilla (C=1) and SPN (C=3) datasets sharing one target
// scale, built from the fused tensor. The target is the alpha-smoothed
// series for both variants.
std::pair<Dataset, Dataset> build_datasets(const FeatureTensor& tensor,
                                           const WindowSpec& splits);

// Runs models x {vanilla, spn} x lookbacks x seeds. Each run is trained
// single-threaded and deterministically; with cfg.threads > 1 independent
// runs execute concurrently, and the returned order is fixed either way.
std::vector<RunResult> run_benchmark(const FeatureTensor& tensor,
                                     const BenchmarkConfig& cfg,
                                     std::ostream* progress = nullptr);

// 100 * (vanilla - spn) / vanilla; positive when SPN helps.
double improvement_pct(double vanilla_mse, double spn_mse);

// Mean over lookbacks of improvement_pct on per-lookback seed-mean MSEs.
// use_test selects test vs train MSE.
double avg_improvement_pct(const std::vector<RunResult>& results,
                           ModelKind kind, bool use_test);

// model,spn,L,T,seed,train_mse,val_mse,test_mse,epochs,wall_clock_s
void write_results_csv(std::ostream& out,
                       const std::vector<RunResult>& results);
std::vector<RunResult> read_results_csv(std::istream& in);

// Per-lookback mean±std columns per model variant plus the avg-imp row,
// with model and lookback order taken from the results. Deterministic
// bytes for identical results (no wall-clock content).
void write_summary_csv(std::ostream& out,
                       const std::vector<RunResult>& results);

// Retrains one configuration and writes de-standardized test predictions,
// one row per (sample, horizon step, cell): hour_index,cell,y_true,y_pred,
// model.
void dump_predictions(const FeatureTensor& tensor, const BenchmarkConfig& cfg,
                      ModelKind kind, bool spn, int lookback,
                      std::uint64_t seed, std::ostream& out);

}  // namespace hexflow
