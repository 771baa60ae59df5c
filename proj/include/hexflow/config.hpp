#pragma once

#include <string>

#include "hexflow/forecast/benchmark.hpp"
#include "hexflow/stops.hpp"
#include "hexflow/synth.hpp"

namespace hexflow {

struct MaskConfig {
  bool enabled = false;  // apply the urban mask as a flow cell filter
  double tau = 8.0;
  double bandwidth_m = 0.0;  // 0 means 2x cell pitch
  double cutoff = 0.5;
};

// Everything the end-to-end benchmark chain needs, loadable from one JSON
// file. Absent keys keep their defaults.
struct PipelineConfig {
  SynthConfig synth;
  StopParams stops;
  int min_records = 30;
  double alpha = 0.5;
  MaskConfig mask;
  BenchmarkConfig benchmark;

  void validate() const;  // throws ConfigError
};

// Throws InputError when the file cannot be read, ConfigError on malformed
// JSON or out-of-range values.
PipelineConfig load_pipeline_config(const std::string& path);
PipelineConfig parse_pipeline_config(const std::string& json_text);

}  // namespace hexflow
