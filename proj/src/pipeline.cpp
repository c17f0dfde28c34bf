#include "pucl/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "pucl/error.hpp"

namespace pucl {

using nlohmann::json;

namespace {

std::string hex_hash(const std::filesystem::path& path) {
  std::ostringstream os;
  os << std::hex << fnv1a_file(path);
  return os.str();
}

PUDataset sample_pu(const RunConfig& cfg, const SupervisedDataset& sup) {
  if (cfg.data.setting == PuSetting::kCaseControl)
    return sample_pu_case_control(sup, cfg.data.n_labeled, cfg.data.n_unlabeled,
                                  cfg.seed);
  return sample_pu_single_dataset(sup, cfg.data.n_labeled, cfg.seed);
}

std::vector<int> head_predict(const LinearHead& head, const Matrix& z) {
  std::vector<int> pred(z.rows());
  Vector s = head.scores(z);
  for (Eigen::Index i = 0; i < z.rows(); ++i) pred[i] = s(i) >= 0.0 ? 1 : 0;
  return pred;
}

}  // namespace

json PipelineResult::to_json() const {
  json j;
  j["metrics"] = {{"accuracy", metrics.accuracy},
                  {"precision", metrics.precision},
                  {"recall", metrics.recall},
                  {"f1", metrics.f1}};
  j["pupl"] = {{"one_step_potential", pupl_one_step_potential},
               {"potential", pupl_potential},
               {"iterations", pupl_iterations},
               {"pseudo_single_class", pseudo_single_class}};
  j["train"] = {
      {"epochs", history.loss.size()},
      {"steps", history.steps},
      {"final_loss", history.loss.empty() ? 0.0 : history.loss.back()},
      {"initial_loss", history.loss.empty() ? 0.0 : history.loss.front()}};
  return j;
}

PipelineResult run_pipeline(const RunConfig& cfg) {
  SupervisedDataset sup = gen_gmm(cfg.data.gmm_spec(cfg.seed));
  PUDataset pu = sample_pu(cfg, sup);

  std::vector<int> widths;
  widths.push_back(cfg.data.d);
  for (int w : cfg.encoder.widths) widths.push_back(w);
  RngStream init_rng(cfg.seed, 42);
  MlpEncoder enc = MlpEncoder::random_init(widths, cfg.encoder.activation,
                                           cfg.encoder.normalize, init_rng);

  PipelineResult result;
  result.history = train_encoder(enc, train_view(pu), cfg.loss.kind, cfg.train);

  Matrix z = enc.encode(pu.features);
  std::vector<char> labeled(pu.observed.size());
  bool any_labeled = false;
  for (std::size_t i = 0; i < pu.observed.size(); ++i) {
    labeled[i] = pu.observed[i] == Observed::kP;
    any_labeled |= labeled[i] != 0;
  }

  std::vector<int> pseudo;
  if (any_labeled) {
    PuplResult pl = pupl(z, labeled, cfg.seed, cfg.pupl.max_iter, cfg.pupl.tol);
    pseudo = pl.pseudo_labels;
    result.pupl_one_step_potential = pl.one_step_potential;
    result.pupl_potential = pl.clustering.potential;
    result.pupl_iterations = pl.clustering.iterations;
  } else {
    // gamma = 0: no seed centroid available, fall back to plain k-means++;
    // cluster 1 plays the positive role
    Clustering cl = kmeanspp(z, cfg.seed, cfg.pupl.max_iter, cfg.pupl.tol);
    pseudo = cl.assignments;
    result.pupl_potential = cl.potential;
    result.pupl_iterations = cl.iterations;
    result.pupl_one_step_potential = cl.potential;
  }

  SupervisedDataset test = gen_gmm([&] {
    GmmSpec spec = cfg.data.gmm_spec(cfg.seed + 0x7e57);
    spec.n = cfg.data.n_test;
    return spec;
  }());
  Matrix z_test = enc.encode(test.features);

  long pos = std::count(pseudo.begin(), pseudo.end(), 1);
  std::vector<int> pred;
  if (pos == 0 || pos == static_cast<long>(pseudo.size())) {
    // collapsed pseudo-labeling: predict the single observed class
    result.pseudo_single_class = true;
    pred.assign(test.truth.size(), pos == 0 ? 0 : 1);
  } else {
    LinearHead head = train_ce(z, pseudo, cfg.head);
    pred = head_predict(head, z_test);
  }
  result.metrics = evaluate(pred, test.truth);
  return result;
}

void cmd_gen_data(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);
  SupervisedDataset sup = gen_gmm(cfg.data.gmm_spec(cfg.seed));
  PUDataset pu = sample_pu(cfg, sup);
  fs::path csv = out_dir / "dataset.csv";
  write_pu_csv(pu, csv);
  auto t1 = std::chrono::steady_clock::now();

  Manifest m;
  m.config = config_to_json(cfg);
  m.seed = cfg.seed;
  m.artifact_hashes["dataset.csv"] = hex_hash(csv);
  m.timings_ms["gen_data"] =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  write_manifest(m, out_dir / "manifest.json");
}

PipelineResult cmd_pipeline(const RunConfig& cfg,
                            const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);

  SupervisedDataset sup = gen_gmm(cfg.data.gmm_spec(cfg.seed));
  PUDataset pu = sample_pu(cfg, sup);
  write_pu_csv(pu, out_dir / "dataset.csv");

  std::vector<int> widths;
  widths.push_back(cfg.data.d);
  for (int w : cfg.encoder.widths) widths.push_back(w);
  RngStream init_rng(cfg.seed, 42);
  MlpEncoder enc = MlpEncoder::random_init(widths, cfg.encoder.activation,
                                           cfg.encoder.normalize, init_rng);
  PipelineResult result;
  result.history = train_encoder(enc, train_view(pu), cfg.loss.kind, cfg.train);
  enc.save_json(out_dir / "encoder.json");

  Matrix z = enc.encode(pu.features);
  write_matrix_csv(z, out_dir / "embeddings.csv");
  std::vector<char> labeled(pu.observed.size());
  bool any_labeled = false;
  for (std::size_t i = 0; i < pu.observed.size(); ++i) {
    labeled[i] = pu.observed[i] == Observed::kP;
    any_labeled |= labeled[i] != 0;
  }
  std::vector<int> pseudo;
  if (any_labeled) {
    PuplResult pl = pupl(z, labeled, cfg.seed, cfg.pupl.max_iter, cfg.pupl.tol);
    pseudo = pl.pseudo_labels;
    result.pupl_one_step_potential = pl.one_step_potential;
    result.pupl_potential = pl.clustering.potential;
    result.pupl_iterations = pl.clustering.iterations;
  } else {
    Clustering cl = kmeanspp(z, cfg.seed, cfg.pupl.max_iter, cfg.pupl.tol);
    pseudo = cl.assignments;
    result.pupl_potential = cl.potential;
    result.pupl_one_step_potential = cl.potential;
    result.pupl_iterations = cl.iterations;
  }
  {
    std::ofstream out(out_dir / "pseudo_labels.csv");
    out << "pseudo\n";
    for (int p : pseudo) out << p << '\n';
  }

  SupervisedDataset test = gen_gmm([&] {
    GmmSpec spec = cfg.data.gmm_spec(cfg.seed + 0x7e57);
    spec.n = cfg.data.n_test;
    return spec;
  }());
  Matrix z_test = enc.encode(test.features);
  long pos = std::count(pseudo.begin(), pseudo.end(), 1);
  std::vector<int> pred;
  if (pos == 0 || pos == static_cast<long>(pseudo.size())) {
    result.pseudo_single_class = true;
    pred.assign(test.truth.size(), pos == 0 ? 0 : 1);
  } else {
    LinearHead head = train_ce(z, pseudo, cfg.head);
    head.save_json(out_dir / "head.json");
    pred = head_predict(head, z_test);
  }
  result.metrics = evaluate(pred, test.truth);

  {
    std::ofstream out(out_dir / "metrics.json");
    out << result.to_json().dump(2) << '\n';
  }
  auto t1 = std::chrono::steady_clock::now();

  Manifest m;
  m.config = config_to_json(cfg);
  m.seed = cfg.seed;
  for (const char* name :
       {"dataset.csv", "embeddings.csv", "pseudo_labels.csv", "metrics.json"})
    m.artifact_hashes[name] = hex_hash(out_dir / name);
  m.timings_ms["pipeline"] =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  write_manifest(m, out_dir / "manifest.json");
  return result;
}

SweepAxis sweep_axis_from_name(const std::string& name) {
  if (name == "gamma") return SweepAxis::kGamma;
  if (name == "pi_p") return SweepAxis::kPiP;
  if (name == "loss_kind") return SweepAxis::kLossKind;
  fail(ErrorKind::kInvalidArgs, "sweep: unknown axis " + name);
}

int worker_count(std::size_t tasks) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("PUCL_WORKERS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) hw = static_cast<unsigned>(v);
  }
  return static_cast<int>(std::min<std::size_t>(hw, std::max<std::size_t>(tasks, 1)));
}

std::vector<SweepRow> run_sweep(const RunConfig& base, SweepAxis axis,
                                const std::vector<std::string>& values,
                                int seeds) {
  if (values.empty() || seeds < 1)
    fail(ErrorKind::kInvalidArgs, "sweep: need values and seeds >= 1");

  struct Task {
    RunConfig cfg;
    SweepRow row;
  };
  std::vector<Task> tasks;
  for (const std::string& value : values) {
    for (int s = 0; s < seeds; ++s) {
      RunConfig cfg = base;
      cfg.seed = base.seed + static_cast<std::uint64_t>(s);
      cfg.train.seed = cfg.seed;
      cfg.head.seed = cfg.seed;
      switch (axis) {
        case SweepAxis::kGamma: {
          double gamma = std::stod(value);
          if (gamma < 0.0) fail(ErrorKind::kInvalidArgs, "sweep: gamma >= 0");
          if (cfg.data.setting == PuSetting::kCaseControl) {
            cfg.data.n_labeled = static_cast<int>(
                std::lround(gamma * cfg.data.n_unlabeled));
          } else {
            double n = cfg.data.n;
            cfg.data.n_labeled =
                static_cast<int>(std::lround(gamma * n / (1.0 + gamma)));
          }
          break;
        }
        case SweepAxis::kPiP:
          cfg.data.pi_p = std::stod(value);
          break;
        case SweepAxis::kLossKind:
          cfg.loss.kind = loss_kind_from_name(value);
          break;
      }
      cfg.train.tau = cfg.loss.tau;
      cfg.train.lambda = cfg.loss.lambda;
      Task t;
      t.cfg = cfg;
      t.row.axis_value = value;
      t.row.loss_kind = loss_kind_name(cfg.loss.kind);
      t.row.seed = cfg.seed;
      tasks.push_back(std::move(t));
    }
  }

  const int workers = worker_count(tasks.size());
  std::atomic<std::size_t> next{0};
  std::vector<SweepRow> rows(tasks.size());
  auto run_range = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      PipelineResult r = run_pipeline(tasks[i].cfg);
      rows[i] = tasks[i].row;
      rows[i].accuracy = r.metrics.accuracy;
    }
  };
  if (workers <= 1) {
    run_range();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_range);
    for (std::thread& t : pool) t.join();
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path.string());
  out << "axis_value,loss_kind,accuracy,seed\n";
  for (const SweepRow& r : rows)
    out << r.axis_value << ',' << r.loss_kind << ',' << format_double(r.accuracy)
        << ',' << r.seed << '\n';
}

}  // namespace pucl
