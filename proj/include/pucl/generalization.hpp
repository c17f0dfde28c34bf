#pragma once

#include <utility>
#include <vector>

#include "pucl/encoder.hpp"
#include "pucl/matrix.hpp"
#include "pucl/pupl.hpp"

namespace pucl {

// Sample with its finite augmentation set and hidden class. Per-sample
// probability mass is pi_p/|C_P| or (1-pi_p)/|C_N| (uniform within class).
struct AugmentedSample {
  Vector base;
  Matrix augs;  // one augmentation per row, non-empty
  int cls = 0;  // 1 = positive, 0 = negative (hidden; evaluation only)
};

struct AugmentedDataset {
  std::vector<AugmentedSample> samples;
  double pi_p = 0.5;

  void validate() const;
  std::vector<double> masses() const;
  // True if some augmentation point appears in both classes' augmentation
  // sets; the disjointness assumption is warned about, not enforced.
  bool augmentation_overlap(double tol = 1e-12) const;
};

// d_T(x_i, x_j) = min cross-pair Euclidean distance between the two sets.
double aug_distance(const Matrix& a, const Matrix& b);

// Largest probability mass (relative to the class) of a subset with
// pairwise d_T-diameter <= delta. Exhaustive for class size <= 15, greedy
// ball-growing (a lower bound) beyond. Returns (sigma_P, sigma_N).
std::pair<double, double> measure_sigma_delta(const AugmentedDataset& ds,
                                              double delta);

// Probability mass of samples whose own augmentations embed more than
// epsilon apart for some pair.
double r_epsilon(const MlpEncoder& enc, const AugmentedDataset& ds,
                 double epsilon);

// eta = 2(1-sigma) + R_eps / min{pi, 1-pi} + sigma(L delta + 2 eps)
double eta(double sigma, double delta, double epsilon, double r_eps,
           double pi_p, double lipschitz);

// inf over h in (0, eps/(2 sqrt(d) L M)) of
// 4 max(1, m^2 h^2 d) / (h^2 d (eps - 2 sqrt(d) L M h)), via a log-spaced
// grid of 10^4 interior points.
double eta_prime(double epsilon, int d, double lipschitz, double transform_lip,
                 double transform_count, long grid = 10000);

struct BoundReport {
  double sigma = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;
  double r_eps = 0.0;
  double eta = 0.0;
  double eta_prime = 0.0;
  double lipschitz = 0.0;
  double transform_lip = 0.0;   // M
  double transform_count = 0.0; // m
  double delta_mu = 0.0;        // 1/2 - 1/2 min |mu_l|^2 (true centroids)
  double zeta_p = 0.0;
  double zeta_n = 0.0;
  double zeta_mu = 0.0;         // zeta_p + zeta_n + zeta_p * zeta_n
  double mu_dot = 0.0;          // estimated centroid inner product
  double threshold = 0.0;       // 1 - eta - sqrt(2 eta) - delta_mu - zeta_mu
  double threshold_half_delta_mu = 0.0;  // variant with delta_mu / 2
  bool condition_holds = false;
  double err = 0.0;
  double bound = 0.0;           // min(1, (1 - sigma) + r_eps)
  bool violation = false;       // condition held but err > bound
  bool lipschitz_is_lower_bound = true;
  bool augmentation_overlap_warning = false;
};

struct Theorem3Options {
  double transform_lip = 1.0;       // M; 1 for additive-noise presets
  double transform_count = -1.0;    // m; defaults to |T(x)|
  std::vector<double> delta_grid;   // defaults to within-class d_T quantiles
};

// Evaluates every Theorem 3 symbol on the dataset: true class centroids
// from hidden labels, estimated centroids from the supplied clustering,
// the centroid-separation condition, the worst-case nearest-centroid error
// over augmentation sets, and the (1 - sigma) + R_eps bound. The (sigma,
// delta) pair is chosen over a delta grid: the condition-true entry with
// the smallest bound when one exists, otherwise the largest-sigma entry.
BoundReport check_theorem3(const MlpEncoder& enc, const AugmentedDataset& ds,
                           const Clustering& clustering, double epsilon,
                           double lipschitz, Theorem3Options opts = {});

struct Lemma2Report {
  double lhs = 0.0;  // R_eps
  double rhs = 0.0;  // eta_prime * sqrt(l_align)
  double l_align = 0.0;
  double eta_prime = 0.0;
  bool holds = false;
};

Lemma2Report lemma2_check(const MlpEncoder& enc, const AugmentedDataset& ds,
                          double epsilon, double lipschitz,
                          double transform_lip, double transform_count);

struct Lemma3Result {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double c_value = 0.0;
  double c_prime = 0.0;
};

// log(exp(L_II + c) + c') < 1 - eta - sqrt(2 eta) - delta_mu/2 - zeta_mu
Lemma3Result lemma3_condition(double l_unif, double sigma, double delta,
                              double epsilon, double r_eps, double pi_p,
                              double lipschitz, double eta_val,
                              double delta_mu, double zeta_mu);

// Embeds every augmentation set and evaluates the tau=1 split.
SplitReport split_for_dataset(const MlpEncoder& enc, const AugmentedDataset& ds);

}  // namespace pucl
