#include "pucl/pu_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "pucl/error.hpp"

namespace pucl {

namespace {

// First k entries of a seeded Fisher-Yates pass over 0..n-1.
std::vector<int> sample_without_replacement(int n, int k, RngStream& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace

int SupervisedDataset::positive_count() const {
  return static_cast<int>(std::count(truth.begin(), truth.end(), 1));
}

int PUDataset::labeled_count() const {
  return static_cast<int>(std::count(observed.begin(), observed.end(), Observed::kP));
}

SupervisedDataset gen_gmm(const GmmSpec& spec) {
  if (spec.d <= 0 || spec.n < 0 || spec.sigma <= 0.0 || spec.pi_p <= 0.0 ||
      spec.pi_p >= 1.0 || spec.mean_pos.size() != spec.d ||
      spec.mean_neg.size() != spec.d)
    fail(ErrorKind::kInvalidSpec, "gen_gmm: invalid spec");
  RngStream rng(spec.seed, 0);
  SupervisedDataset ds;
  ds.pi_p = spec.pi_p;
  ds.features.resize(spec.n, spec.d);
  ds.truth.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    bool positive = rng.uniform01() < spec.pi_p;
    ds.truth[i] = positive ? 1 : 0;
    const Vector& mean = positive ? spec.mean_pos : spec.mean_neg;
    for (int c = 0; c < spec.d; ++c)
      ds.features(i, c) = mean(c) + spec.sigma * rng.normal();
  }
  return ds;
}

PUDataset sample_pu_case_control(const SupervisedDataset& sup, int n_p, int n_u,
                                 std::uint64_t seed) {
  const int n = static_cast<int>(sup.features.rows());
  if (n_u < 1 || n_u > n)
    fail(ErrorKind::kInsufficientRows, "case_control: need 1 <= n_u <= n");
  std::vector<int> positives;
  for (int i = 0; i < n; ++i)
    if (sup.truth[i] == 1) positives.push_back(i);
  if (n_p > static_cast<int>(positives.size()))
    fail(ErrorKind::kInsufficientPositives,
         "case_control: fewer than n_p positive rows available");
  RngStream rng(seed, 1);
  std::vector<int> p_pick = sample_without_replacement(
      static_cast<int>(positives.size()), n_p, rng);
  std::vector<int> u_pick = sample_without_replacement(n, n_u, rng);

  PUDataset ds;
  ds.pi_p = sup.pi_p;
  ds.setting = PuSetting::kCaseControl;
  ds.gamma = static_cast<double>(n_p) / static_cast<double>(n_u);
  ds.features.resize(n_p + n_u, sup.features.cols());
  ds.observed.resize(n_p + n_u);
  ds.truth.resize(n_p + n_u);
  for (int i = 0; i < n_p; ++i) {
    int src = positives[p_pick[i]];
    ds.features.row(i) = sup.features.row(src);
    ds.observed[i] = Observed::kP;
    ds.truth[i] = 1;
  }
  for (int i = 0; i < n_u; ++i) {
    int src = u_pick[i];
    ds.features.row(n_p + i) = sup.features.row(src);
    ds.observed[n_p + i] = Observed::kU;
    ds.truth[n_p + i] = sup.truth[src];
  }
  return ds;
}

PUDataset sample_pu_single_dataset(const SupervisedDataset& sup, int n_l,
                                   std::uint64_t seed) {
  const int n = static_cast<int>(sup.features.rows());
  std::vector<int> positives;
  for (int i = 0; i < n; ++i)
    if (sup.truth[i] == 1) positives.push_back(i);
  if (n_l > static_cast<int>(positives.size()) || n_l < 0)
    fail(ErrorKind::kInsufficientPositives,
         "single_dataset: fewer than n_l positive rows available");
  if (n_l >= n)
    fail(ErrorKind::kInsufficientRows, "single_dataset: no unlabeled rows left");
  RngStream rng(seed, 2);
  std::vector<int> l_pick = sample_without_replacement(
      static_cast<int>(positives.size()), n_l, rng);
  std::vector<char> is_labeled(n, 0);
  for (int i : l_pick) is_labeled[positives[i]] = 1;

  PUDataset ds;
  ds.pi_p = sup.pi_p;
  ds.setting = PuSetting::kSingleDataset;
  ds.gamma = static_cast<double>(n_l) / static_cast<double>(n - n_l);
  ds.features.resize(n, sup.features.cols());
  ds.observed.resize(n);
  ds.truth.resize(n);
  int row = 0;
  // labeled rows first, then the remainder, order within groups preserved
  for (int pass = 0; pass < 2; ++pass) {
    for (int i = 0; i < n; ++i) {
      if ((pass == 0) != (is_labeled[i] != 0)) continue;
      ds.features.row(row) = sup.features.row(i);
      ds.observed[row] = pass == 0 ? Observed::kP : Observed::kU;
      ds.truth[row] = sup.truth[i];
      ++row;
    }
  }
  return ds;
}

std::pair<double, double> noise_rates(double pi_p, double gamma) {
  if (pi_p <= 0.0 || pi_p >= 1.0 || gamma < 0.0)
    fail(ErrorKind::kInvalidArgs, "noise_rates: pi_p in (0,1), gamma >= 0");
  return {pi_p / (gamma + pi_p), 0.0};
}

bool breakdown_violated(double pi_p, double gamma) {
  if (pi_p <= 0.0 || pi_p >= 1.0 || gamma < 0.0)
    fail(ErrorKind::kInvalidArgs, "breakdown_violated: invalid arguments");
  return gamma <= 2.0 * pi_p - 1.0;
}

double kappa_pu(double pi_p, double gamma) {
  if (pi_p <= 0.0 || pi_p >= 1.0 || gamma < 0.0)
    fail(ErrorKind::kInvalidArgs, "kappa_pu: invalid arguments");
  return pi_p * (1.0 - pi_p) / (1.0 + gamma);
}

void write_pu_csv(const PUDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  for (Eigen::Index c = 0; c < ds.features.cols(); ++c) out << 'x' << c << ',';
  out << "observed,truth\n";
  for (Eigen::Index r = 0; r < ds.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < ds.features.cols(); ++c)
      out << format_double(ds.features(r, c)) << ',';
    out << (ds.observed[r] == Observed::kP ? 'P' : 'U') << ',' << ds.truth[r]
        << '\n';
  }
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

PUDataset read_pu_csv(const std::filesystem::path& path, double pi_p,
                      PuSetting setting) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::kIo, "empty csv: " + path.string());
  Eigen::Index cols = 1;
  for (char ch : line)
    if (ch == ',') ++cols;
  if (cols < 3) fail(ErrorKind::kIo, "pu csv needs x*,observed,truth columns");
  const Eigen::Index d = cols - 2;
  std::vector<double> feats;
  std::vector<Observed> observed;
  std::vector<int> truth;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    for (Eigen::Index c = 0; c < d; ++c) {
      if (!std::getline(ss, cell, ',')) fail(ErrorKind::kIo, "ragged pu csv");
      feats.push_back(std::stod(cell));
    }
    if (!std::getline(ss, cell, ',')) fail(ErrorKind::kIo, "ragged pu csv");
    if (cell != "P" && cell != "U") fail(ErrorKind::kIo, "observed must be P or U");
    observed.push_back(cell == "P" ? Observed::kP : Observed::kU);
    if (!std::getline(ss, cell, ',')) fail(ErrorKind::kIo, "ragged pu csv");
    truth.push_back(std::stoi(cell));
  }
  PUDataset ds;
  const Eigen::Index n = static_cast<Eigen::Index>(observed.size());
  ds.features.resize(n, d);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < d; ++c) ds.features(r, c) = feats[r * d + c];
  require_finite(ds.features, "read_pu_csv");
  ds.observed = std::move(observed);
  ds.truth = std::move(truth);
  ds.pi_p = pi_p;
  ds.setting = setting;
  int n_p = ds.labeled_count();
  int n_u = static_cast<int>(n) - n_p;
  ds.gamma = n_u > 0 ? static_cast<double>(n_p) / n_u : 0.0;
  return ds;
}

}  // namespace pucl
