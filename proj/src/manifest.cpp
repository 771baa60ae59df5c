#include "hexflow/manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "hexflow/error.hpp"

namespace hexflow {

std::string file_digest_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path + " for digesting");
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(hash));
  return hex;
}

void PipelineManifest::set_config(const std::string& path) {
  config_path_ = path;
  config_digest_ = file_digest_hex(path);
}

void PipelineManifest::record_stage(const std::string& stage,
                                    const std::vector<std::string>& inputs,
                                    const std::vector<std::string>& outputs,
                                    double seconds) {
  Stage s;
  s.name = stage;
  s.inputs = inputs;
  s.seconds = seconds;
  for (const std::string& path : outputs) {
    Output o;
    o.path = path;
    o.digest = file_digest_hex(path);
    o.bytes = static_cast<std::uint64_t>(std::filesystem::file_size(path));
    s.outputs.push_back(std::move(o));
  }
  stages_.push_back(std::move(s));
}

void PipelineManifest::write(const std::string& path) const {
  nlohmann::json j;
  if (!config_path_.empty()) {
    j["config"] = {{"path", config_path_}, {"digest", config_digest_}};
  }
  j["stages"] = nlohmann::json::array();
  for (const Stage& s : stages_) {
    nlohmann::json stage;
    stage["name"] = s.name;
    stage["inputs"] = s.inputs;
    stage["seconds"] = s.seconds;
    stage["outputs"] = nlohmann::json::array();
    for (const Output& o : s.outputs) {
      stage["outputs"].push_back(
          {{"path", o.path}, {"digest", o.digest}, {"bytes", o.bytes}});
    }
    j["stages"].push_back(std::move(stage));
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace hexflow
