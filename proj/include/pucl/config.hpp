#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pucl/classifier_head.hpp"
#include "pucl/encoder.hpp"
#include "pucl/pu_data.hpp"

namespace pucl {

struct DataConfig {
  int d = 2;
  Vector mean_pos;  // defaults to (+2, 0, ...)
  Vector mean_neg;  // defaults to (-2, 0, ...)
  double sigma = 1.0;
  int n = 0;
  int n_test = 500;
  double pi_p = 0.5;
  PuSetting setting = PuSetting::kCaseControl;
  int n_labeled = 0;
  int n_unlabeled = 0;  // case-control only; single dataset labels in place

  GmmSpec gmm_spec(std::uint64_t seed) const;
};

struct EncoderConfig {
  std::vector<int> widths;  // hidden+output; input width comes from data.d
  Activation activation = Activation::kTanh;
  bool normalize = true;
};

struct LossConfig {
  LossKind kind = LossKind::kPucl;
  double tau = 0.5;
  double lambda = 0.1;
};

struct PuplConfig {
  int max_iter = 100;
  double tol = 1e-8;
};

struct RunConfig {
  std::uint64_t seed = 0;
  DataConfig data;
  EncoderConfig encoder;
  LossConfig loss;
  TrainHyper train;  // lr/epochs/batch_size/aug_sigma (tau/lambda from loss)
  PuplConfig pupl;
  HeadConfig head;
};

// Strict parse: unknown keys anywhere are rejected with the offending key
// path in the message (kInvalidConfig).
RunConfig parse_config(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig load_config_file(const std::filesystem::path& path);

// Run manifest: config snapshot, RNG algorithm, seed, artifact hashes
// (FNV-1a 64 of the file bytes), timings. Written atomically.
struct Manifest {
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> artifact_hashes;
  std::map<std::string, double> timings_ms;
  std::string tool_version;
};

std::uint64_t fnv1a_file(const std::filesystem::path& path);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace pucl
