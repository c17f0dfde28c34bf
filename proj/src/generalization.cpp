#include "pucl/generalization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pucl/error.hpp"

namespace pucl {

void AugmentedDataset::validate() const {
  if (samples.empty())
    fail(ErrorKind::kInvalidArgs, "AugmentedDataset: no samples");
  if (pi_p <= 0.0 || pi_p >= 1.0)
    fail(ErrorKind::kInvalidArgs, "AugmentedDataset: pi_p in (0,1)");
  bool has_p = false, has_n = false;
  for (const AugmentedSample& s : samples) {
    if (s.augs.rows() == 0)
      fail(ErrorKind::kEmptyAugmentationSet, "AugmentedDataset: empty T(x)");
    (s.cls == 1 ? has_p : has_n) = true;
  }
  if (!has_p || !has_n)
    fail(ErrorKind::kInvalidArgs, "AugmentedDataset: both classes required");
}

std::vector<double> AugmentedDataset::masses() const {
  long n_p = 0, n_n = 0;
  for (const AugmentedSample& s : samples) (s.cls == 1 ? n_p : n_n) += 1;
  std::vector<double> mass(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    mass[i] = samples[i].cls == 1 ? pi_p / n_p : (1.0 - pi_p) / n_n;
  return mass;
}

bool AugmentedDataset::augmentation_overlap(double tol) const {
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      if (samples[i].cls == samples[j].cls) continue;
      if (aug_distance(samples[i].augs, samples[j].augs) <= tol) return true;
    }
  return false;
}

double aug_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() == 0 || b.rows() == 0)
    fail(ErrorKind::kEmptySet, "aug_distance: empty augmentation set");
  if (a.cols() != b.cols())
    fail(ErrorKind::kDimMismatch, "aug_distance: dimension mismatch");
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      best = std::min(best, (a.row(i) - b.row(j)).norm());
  return best;
}

namespace {

// pairwise d_T distances among the class members with the given indices
Matrix class_aug_distances(const AugmentedDataset& ds,
                           const std::vector<int>& members) {
  const int m = static_cast<int>(members.size());
  Matrix d = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      double v = aug_distance(ds.samples[members[i]].augs,
                              ds.samples[members[j]].augs);
      d(i, j) = d(j, i) = v;
    }
  return d;
}

int exhaustive_best_subset(const Matrix& d, double delta) {
  const int m = static_cast<int>(d.rows());
  // adjacency bitsets: j compatible with i iff d(i,j) <= delta
  std::vector<std::uint32_t> adj(m, 0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (d(i, j) <= delta) adj[i] |= 1u << j;
  int best = 0;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    int size = std::popcount(mask);
    if (size <= best) continue;
    bool ok = true;
    for (int i = 0; i < m && ok; ++i)
      if (mask & (1u << i))
        if ((mask & adj[i]) != mask) ok = false;
    if (ok) best = size;
  }
  return best;
}

int greedy_best_subset(const Matrix& d, double delta) {
  const int m = static_cast<int>(d.rows());
  int best = 0;
  for (int seed = 0; seed < m; ++seed) {
    std::vector<int> set{seed};
    std::vector<char> used(m, 0);
    used[seed] = 1;
    for (;;) {
      int pick = -1;
      for (int cand = 0; cand < m; ++cand) {
        if (used[cand]) continue;
        bool ok = true;
        for (int s : set)
          if (d(cand, s) > delta) {
            ok = false;
            break;
          }
        if (ok) {
          pick = cand;
          break;
        }
      }
      if (pick < 0) break;
      used[pick] = 1;
      set.push_back(pick);
    }
    best = std::max(best, static_cast<int>(set.size()));
  }
  return best;
}

double class_sigma(const AugmentedDataset& ds, const std::vector<int>& members,
                   double delta) {
  if (members.empty()) return 0.0;
  Matrix d = class_aug_distances(ds, members);
  int size = static_cast<int>(members.size());
  int best = size <= 15 ? exhaustive_best_subset(d, delta)
                        : greedy_best_subset(d, delta);
  return static_cast<double>(best) / size;
}

std::vector<int> class_members(const AugmentedDataset& ds, int cls) {
  std::vector<int> out;
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    if (ds.samples[i].cls == cls) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<Matrix> embed_sets(const MlpEncoder& enc,
                               const AugmentedDataset& ds) {
  std::vector<Matrix> embedded(ds.samples.size());
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    embedded[i] = enc.encode(ds.samples[i].augs);
  return embedded;
}

}  // namespace

std::pair<double, double> measure_sigma_delta(const AugmentedDataset& ds,
                                              double delta) {
  ds.validate();
  if (delta < 0.0)
    fail(ErrorKind::kInvalidArgs, "measure_sigma_delta: delta >= 0");
  return {class_sigma(ds, class_members(ds, 1), delta),
          class_sigma(ds, class_members(ds, 0), delta)};
}

double r_epsilon(const MlpEncoder& enc, const AugmentedDataset& ds,
                 double epsilon) {
  ds.validate();
  if (epsilon <= 0.0)
    fail(ErrorKind::kInvalidArgs, "r_epsilon: epsilon > 0");
  std::vector<double> mass = ds.masses();
  std::vector<Matrix> embedded = embed_sets(enc, ds);
  double total = 0.0;
  for (std::size_t i = 0; i < embedded.size(); ++i) {
    const Matrix& z = embedded[i];
    bool violated = false;
    for (Eigen::Index u = 0; u < z.rows() && !violated; ++u)
      for (Eigen::Index v = u + 1; v < z.rows(); ++v)
        if ((z.row(u) - z.row(v)).norm() > epsilon) {
          violated = true;
          break;
        }
    if (violated) total += mass[i];
  }
  return total;
}

double eta(double sigma, double delta, double epsilon, double r_eps,
           double pi_p, double lipschitz) {
  if (sigma <= 0.0 || sigma > 1.0 || delta < 0.0 || epsilon < 0.0 ||
      r_eps < 0.0 || pi_p <= 0.0 || pi_p >= 1.0 || lipschitz < 0.0)
    fail(ErrorKind::kInvalidArgs, "eta: arguments out of range");
  return 2.0 * (1.0 - sigma) + r_eps / std::min(pi_p, 1.0 - pi_p) +
         sigma * (lipschitz * delta + 2.0 * epsilon);
}

double eta_prime(double epsilon, int d, double lipschitz, double transform_lip,
                 double transform_count, long grid) {
  if (epsilon <= 0.0 || d < 1 || lipschitz <= 0.0 || transform_lip <= 0.0 ||
      transform_count < 0.0)
    fail(ErrorKind::kInvalidArgs, "eta_prime: arguments out of range");
  const double h_max = epsilon / (2.0 * std::sqrt(static_cast<double>(d)) *
                                  lipschitz * transform_lip);
  if (!(h_max > 0.0) || !std::isfinite(h_max))
    fail(ErrorKind::kEmptyDomain, "eta_prime: empty h interval");
  const double lo = h_max * 1e-9;
  const double hi = h_max * (1.0 - 1e-9);
  const double dd = static_cast<double>(d);
  const double m2d = transform_count * transform_count * dd;
  double best = std::numeric_limits<double>::infinity();
  for (long i = 0; i < grid; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(grid - 1);
    double h = lo * std::pow(hi / lo, t);
    double denom = h * h * dd *
                   (epsilon - 2.0 * std::sqrt(dd) * lipschitz * transform_lip * h);
    if (denom <= 0.0) continue;
    double value = 4.0 * std::max(1.0, m2d * h * h) / denom;
    best = std::min(best, value);
  }
  return best;
}

SplitReport split_for_dataset(const MlpEncoder& enc,
                              const AugmentedDataset& ds) {
  ds.validate();
  return alignment_uniformity_split(embed_sets(enc, ds), ds.masses());
}

BoundReport check_theorem3(const MlpEncoder& enc, const AugmentedDataset& ds,
                           const Clustering& clustering, double epsilon,
                           double lipschitz, Theorem3Options opts) {
  ds.validate();
  if (epsilon <= 0.0 || lipschitz <= 0.0)
    fail(ErrorKind::kInvalidArgs, "check_theorem3: epsilon, L > 0");
  for (const AugmentedSample& s : ds.samples)
    if (s.cls != 0 && s.cls != 1)
      fail(ErrorKind::kMissingTruth, "check_theorem3: classes must be 0/1");

  const std::vector<double> mass = ds.masses();
  const std::vector<Matrix> embedded = embed_sets(enc, ds);

  // true class centroids: E_{x in C_l} E_{x' in T(x)} g(x')
  Vector mu_p = Vector::Zero(enc.output_dim());
  Vector mu_n = Vector::Zero(enc.output_dim());
  double w_p = 0.0, w_n = 0.0;
  for (std::size_t i = 0; i < embedded.size(); ++i) {
    Vector mean_i = embedded[i].colwise().mean().transpose();
    if (ds.samples[i].cls == 1) {
      mu_p += mass[i] * mean_i;
      w_p += mass[i];
    } else {
      mu_n += mass[i] * mean_i;
      w_n += mass[i];
    }
  }
  mu_p /= w_p;
  mu_n /= w_n;

  BoundReport rep;
  rep.epsilon = epsilon;
  rep.lipschitz = lipschitz;
  rep.transform_lip = opts.transform_lip;
  rep.transform_count = opts.transform_count > 0.0
                            ? opts.transform_count
                            : static_cast<double>(ds.samples[0].augs.rows());
  rep.r_eps = r_epsilon(enc, ds, epsilon);
  rep.delta_mu = 0.5 - 0.5 * std::min(mu_p.squaredNorm(), mu_n.squaredNorm());
  rep.zeta_p = (clustering.mu_p - mu_p).norm();
  rep.zeta_n = (clustering.mu_n - mu_n).norm();
  rep.zeta_mu = rep.zeta_p + rep.zeta_n + rep.zeta_p * rep.zeta_n;
  rep.mu_dot = clustering.mu_p.dot(clustering.mu_n);
  rep.augmentation_overlap_warning = ds.augmentation_overlap();
  rep.eta_prime = eta_prime(epsilon, static_cast<int>(ds.samples[0].augs.cols()),
                            lipschitz, rep.transform_lip, rep.transform_count);

  // worst-case nearest-centroid error: a sample is wrong if any of its
  // augmentations lands on the wrong side
  double err = 0.0;
  for (std::size_t i = 0; i < embedded.size(); ++i) {
    std::vector<int> labels =
        nearest_centroid_classify(embedded[i], clustering.mu_p, clustering.mu_n);
    bool wrong = false;
    for (int lab : labels)
      if (lab != ds.samples[i].cls) wrong = true;
    if (wrong) err += mass[i];
  }
  rep.err = err;

  // delta grid: within-class d_T distances as natural candidates
  std::vector<double> grid = opts.delta_grid;
  if (grid.empty()) {
    std::vector<double> dists;
    for (int cls : {0, 1}) {
      std::vector<int> members = class_members(ds, cls);
      Matrix d = class_aug_distances(ds, members);
      for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = i + 1; j < d.cols(); ++j)
          dists.push_back(d(i, j));
    }
    std::sort(dists.begin(), dists.end());
    grid.push_back(0.0);
    for (double q : {0.25, 0.5, 0.75, 0.9, 1.0}) {
      if (!dists.empty())
        grid.push_back(dists[static_cast<std::size_t>(
            q * static_cast<double>(dists.size() - 1))]);
    }
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  }

  bool have_condition_true = false;
  BoundReport chosen = rep;
  double best_sigma = -1.0;
  BoundReport fallback = rep;
  for (double delta : grid) {
    auto [sigma_p, sigma_n] = measure_sigma_delta(ds, delta);
    double sigma = std::min(sigma_p, sigma_n);
    if (sigma <= 0.0) continue;
    BoundReport cand = rep;
    cand.sigma = sigma;
    cand.delta = delta;
    cand.eta = eta(sigma, delta, epsilon, rep.r_eps, ds.pi_p, lipschitz);
    cand.threshold =
        1.0 - cand.eta - std::sqrt(2.0 * cand.eta) - rep.delta_mu - rep.zeta_mu;
    cand.threshold_half_delta_mu = 1.0 - cand.eta - std::sqrt(2.0 * cand.eta) -
                                   0.5 * rep.delta_mu - rep.zeta_mu;
    cand.condition_holds = rep.mu_dot < cand.threshold;
    cand.bound = std::min(1.0, (1.0 - sigma) + rep.r_eps);
    cand.violation = cand.condition_holds && cand.err > cand.bound + 1e-12;
    if (cand.condition_holds &&
        (!have_condition_true || cand.bound < chosen.bound)) {
      chosen = cand;
      have_condition_true = true;
    }
    if (cand.violation) {
      chosen = cand;  // a violation is always surfaced
      have_condition_true = true;
      break;
    }
    if (sigma > best_sigma) {
      best_sigma = sigma;
      fallback = cand;
    }
  }
  return have_condition_true ? chosen : fallback;
}

Lemma2Report lemma2_check(const MlpEncoder& enc, const AugmentedDataset& ds,
                          double epsilon, double lipschitz,
                          double transform_lip, double transform_count) {
  Lemma2Report rep;
  rep.lhs = r_epsilon(enc, ds, epsilon);
  rep.l_align = split_for_dataset(enc, ds).l_align;
  rep.eta_prime =
      eta_prime(epsilon, static_cast<int>(ds.samples[0].augs.cols()),
                lipschitz, transform_lip, transform_count);
  rep.rhs = rep.eta_prime * std::sqrt(rep.l_align);
  rep.holds = rep.lhs <= rep.rhs + 1e-12;
  return rep;
}

Lemma3Result lemma3_condition(double l_unif, double sigma, double delta,
                              double epsilon, double r_eps, double pi_p,
                              double lipschitz, double eta_val,
                              double delta_mu, double zeta_mu) {
  if (sigma <= 0.0 || sigma > 1.0 || epsilon <= 0.0 || r_eps < 0.0 ||
      pi_p <= 0.0 || pi_p >= 1.0 || delta < 0.0 || lipschitz < 0.0 ||
      eta_val < 0.0)
    fail(ErrorKind::kInvalidArgs, "lemma3_condition: arguments out of range");
  Lemma3Result res;
  double base = 2.0 * epsilon + lipschitz * delta + 4.0 * (1.0 - sigma) +
                8.0 * r_eps;
  res.c_value = base * base + 4.0 * epsilon + 2.0 * lipschitz * delta +
                8.0 * (1.0 - sigma) + 18.0 * r_eps;
  res.c_prime = std::exp(1.0 / (pi_p * (1.0 - pi_p))) - std::exp(1.0 - epsilon);
  // log(exp(a) + c') computed as a + log1p(c' e^{-a}) to dodge overflow
  double a = l_unif + res.c_value;
  double log_cp = std::log(res.c_prime);  // c' > 0: e^{1/(pi(1-pi))} >= e^4 > e^{1-eps}
  double hi = std::max(a, log_cp);
  res.lhs = hi + std::log(std::exp(a - hi) + std::exp(log_cp - hi));
  res.rhs = 1.0 - eta_val - std::sqrt(2.0 * eta_val) - 0.5 * delta_mu - zeta_mu;
  res.holds = res.lhs < res.rhs;
  return res;
}

}  // namespace pucl
