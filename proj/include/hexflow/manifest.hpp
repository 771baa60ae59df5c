#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hexflow {

// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters.
// Throws InputError when the file cannot be read.
std::string file_digest_hex(const std::string& path);

// Record of one pipeline run: which stage read and produced what, how long
// it took, and the content digest of every produced file.
class PipelineManifest {
 public:
  void set_config(const std::string& path);
  void record_stage(const std::string& stage,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, double seconds);
  void write(const std::string& path) const;

 private:
  struct Output {
    std::string path;
    std::string digest;
    std::uint64_t bytes = 0;
  };
  struct Stage {
    std::string name;
    std::vector<std::string> inputs;
    std::vector<Output> outputs;
    double seconds = 0.0;
  };

  std::string config_path_;
  std::string config_digest_;
  std::vector<Stage> stages_;
};

}  // namespace hexflow
