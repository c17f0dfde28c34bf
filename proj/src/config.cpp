#include "pucl/config.hpp"

#include <fstream>

#include "pucl/error.hpp"
#include "pucl/rng.hpp"

namespace pucl {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    fail(ErrorKind::kInvalidConfig, "config: " + prefix + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known)
      fail(ErrorKind::kInvalidConfig,
           "config: unknown key '" + prefix + it.key() + "'");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

Vector get_vector(const json& j, const char* key, const Vector& fallback) {
  if (!j.contains(key)) return fallback;
  auto values = j.at(key).get<std::vector<double>>();
  Vector v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v(i) = values[i];
  return v;
}

Vector default_mean(int d, double x0) {
  Vector v = Vector::Zero(d);
  v(0) = x0;
  return v;
}

}  // namespace

GmmSpec DataConfig::gmm_spec(std::uint64_t seed) const {
  GmmSpec spec;
  spec.d = d;
  spec.mean_pos = mean_pos;
  spec.mean_neg = mean_neg;
  spec.sigma = sigma;
  spec.n = n;
  spec.pi_p = pi_p;
  spec.seed = seed;
  return spec;
}

RunConfig parse_config(const json& j) {
  check_keys(j, "", {"seed", "data", "encoder", "loss", "train", "pupl", "head"});
  RunConfig cfg;
  cfg.seed = get_or<std::uint64_t>(j, "seed", 0);

  if (!j.contains("data"))
    fail(ErrorKind::kInvalidConfig, "config: missing required key 'data'");
  const json& jd = j.at("data");
  check_keys(jd, "data.",
             {"d", "mean_pos", "mean_neg", "sigma", "n", "n_test", "pi_p",
              "setting", "n_labeled", "n_unlabeled"});
  if (!jd.contains("n"))
    fail(ErrorKind::kInvalidConfig, "config: missing required key 'data.n'");
  cfg.data.d = get_or<int>(jd, "d", 2);
  cfg.data.mean_pos = get_vector(jd, "mean_pos", default_mean(cfg.data.d, 2.0));
  cfg.data.mean_neg = get_vector(jd, "mean_neg", default_mean(cfg.data.d, -2.0));
  cfg.data.sigma = get_or<double>(jd, "sigma", 1.0);
  cfg.data.n = jd.at("n").get<int>();
  cfg.data.n_test = get_or<int>(jd, "n_test", 500);
  cfg.data.pi_p = get_or<double>(jd, "pi_p", 0.5);
  std::string setting = get_or<std::string>(jd, "setting", "case_control");
  if (setting == "case_control")
    cfg.data.setting = PuSetting::kCaseControl;
  else if (setting == "single_dataset")
    cfg.data.setting = PuSetting::kSingleDataset;
  else
    fail(ErrorKind::kInvalidConfig, "config: data.setting must be case_control or single_dataset");
  cfg.data.n_labeled = get_or<int>(jd, "n_labeled", 0);
  cfg.data.n_unlabeled = get_or<int>(jd, "n_unlabeled", cfg.data.n / 2);

  if (j.contains("encoder")) {
    const json& je = j.at("encoder");
    check_keys(je, "encoder.", {"widths", "activation", "normalize"});
    cfg.encoder.widths = get_or<std::vector<int>>(je, "widths", {16, 2});
    cfg.encoder.activation = activation_from_name(
        get_or<std::string>(je, "activation", "tanh"));
    cfg.encoder.normalize = get_or<bool>(je, "normalize", true);
  } else {
    cfg.encoder.widths = {16, 2};
  }

  if (j.contains("loss")) {
    const json& jl = j.at("loss");
    check_keys(jl, "loss.", {"kind", "tau", "lambda"});
    cfg.loss.kind = loss_kind_from_name(get_or<std::string>(jl, "kind", "pucl"));
    cfg.loss.tau = get_or<double>(jl, "tau", 0.5);
    cfg.loss.lambda = get_or<double>(jl, "lambda", 0.1);
  }

  if (j.contains("train")) {
    const json& jt = j.at("train");
    check_keys(jt, "train.", {"lr", "epochs", "batch_size", "aug_sigma"});
    cfg.train.lr = get_or<double>(jt, "lr", 0.05);
    cfg.train.epochs = get_or<int>(jt, "epochs", 300);
    cfg.train.batch_size = get_or<int>(jt, "batch_size", 64);
    cfg.train.aug_sigma = get_or<double>(jt, "aug_sigma", 0.1);
  }
  cfg.train.tau = cfg.loss.tau;
  cfg.train.lambda = cfg.loss.lambda;
  cfg.train.seed = cfg.seed;

  if (j.contains("pupl")) {
    const json& jp = j.at("pupl");
    check_keys(jp, "pupl.", {"max_iter", "tol"});
    cfg.pupl.max_iter = get_or<int>(jp, "max_iter", 100);
    cfg.pupl.tol = get_or<double>(jp, "tol", 1e-8);
  }

  if (j.contains("head")) {
    const json& jh = j.at("head");
    check_keys(jh, "head.", {"lr", "epochs", "l2"});
    cfg.head.lr = get_or<double>(jh, "lr", 0.5);
    cfg.head.epochs = get_or<int>(jh, "epochs", 500);
    cfg.head.l2 = get_or<double>(jh, "l2", 1e-4);
  }
  cfg.head.seed = cfg.seed;
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  json jd;
  jd["d"] = cfg.data.d;
  jd["mean_pos"] = std::vector<double>(cfg.data.mean_pos.data(),
                                       cfg.data.mean_pos.data() + cfg.data.d);
  jd["mean_neg"] = std::vector<double>(cfg.data.mean_neg.data(),
                                       cfg.data.mean_neg.data() + cfg.data.d);
  jd["sigma"] = cfg.data.sigma;
  jd["n"] = cfg.data.n;
  jd["n_test"] = cfg.data.n_test;
  jd["pi_p"] = cfg.data.pi_p;
  jd["setting"] = cfg.data.setting == PuSetting::kCaseControl ? "case_control"
                                                              : "single_dataset";
  jd["n_labeled"] = cfg.data.n_labeled;
  jd["n_unlabeled"] = cfg.data.n_unlabeled;
  j["data"] = jd;
  j["encoder"] = {{"widths", cfg.encoder.widths},
                  {"activation", activation_name(cfg.encoder.activation)},
                  {"normalize", cfg.encoder.normalize}};
  j["loss"] = {{"kind", loss_kind_name(cfg.loss.kind)},
               {"tau", cfg.loss.tau},
               {"lambda", cfg.loss.lambda}};
  j["train"] = {{"lr", cfg.train.lr},
                {"epochs", cfg.train.epochs},
                {"batch_size", cfg.train.batch_size},
                {"aug_sigma", cfg.train.aug_sigma}};
  j["pupl"] = {{"max_iter", cfg.pupl.max_iter}, {"tol", cfg.pupl.tol}};
  j["head"] = {{"lr", cfg.head.lr}, {"epochs", cfg.head.epochs},
               {"l2", cfg.head.l2}};
  return j;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::kInvalidConfig, "config parse error: " + std::string(e.what()));
  }
  return parse_config(j);
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot hash " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  return hash;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  json j;
  j["tool_version"] = manifest.tool_version.empty() ? kToolVersion
                                                    : manifest.tool_version;
  j["rng_algorithm"] = std::string(RngStream::kAlgorithm);
  j["seed"] = manifest.seed;
  j["config"] = manifest.config;
  j["artifact_hashes"] = manifest.artifact_hashes;
  j["timings_ms"] = manifest.timings_ms;
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) fail(ErrorKind::kIo, "cannot open " + tmp.string());
    out << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open manifest " + path.string());
  json j = json::parse(in);
  Manifest m;
  m.config = j.at("config");
  m.seed = j.at("seed").get<std::uint64_t>();
  m.tool_version = j.at("tool_version").get<std::string>();
  if (j.contains("artifact_hashes"))
    m.artifact_hashes =
        j.at("artifact_hashes").get<std::map<std::string, std::string>>();
  if (j.contains("timings_ms"))
    m.timings_ms = j.at("timings_ms").get<std::map<std::string, double>>();
  return m;
}

}  // namespace pucl
