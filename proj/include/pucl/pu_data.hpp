#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "pucl/matrix.hpp"
#include "pucl/rng.hpp"

namespace pucl {

enum class Observed : std::uint8_t { kP, kU };
enum class PuSetting : std::uint8_t { kCaseControl, kSingleDataset };

struct SupervisedDataset {
  Matrix features;          // n x d
  std::vector<int> truth;   // 1 = positive, 0 = negative
  double pi_p = 0.5;        // population positive prior

  int positive_count() const;
};

// Hidden truth travels with the dataset for evaluation, but training code
// only ever receives the PuTrainView below.
struct PUDataset {
  Matrix features;
  std::vector<Observed> observed;
  std::vector<int> truth;
  double pi_p = 0.5;
  double gamma = 0.0;  // n_P / n_U, exact
  PuSetting setting = PuSetting::kCaseControl;

  int labeled_count() const;
};

struct PuTrainView {
  const Matrix& features;
  const std::vector<Observed>& observed;
};

inline PuTrainView train_view(const PUDataset& ds) {
  return PuTrainView{ds.features, ds.observed};
}

struct GmmSpec {
  int d = 2;
  Vector mean_pos;
  Vector mean_neg;
  double sigma = 1.0;  // isotropic std per component
  int n = 0;
  double pi_p = 0.5;
  std::uint64_t seed = 0;
};

SupervisedDataset gen_gmm(const GmmSpec& spec);

// Case-control: n_p positives drawn without replacement from the positive
// rows, n_u rows drawn without replacement from all rows (an independent
// draw, so overlap with the labeled set is possible).
PUDataset sample_pu_case_control(const SupervisedDataset& sup, int n_p, int n_u,
                                 std::uint64_t seed);

// Single dataset: n_l positives of the one shared dataset are revealed,
// every other row becomes U (the U set is not mixture-representative).
PUDataset sample_pu_single_dataset(const SupervisedDataset& sup, int n_l,
                                   std::uint64_t seed);

// Label-noise view of "treat U as negative": (xi_P, xi_N) = (pi/(gamma+pi), 0).
std::pair<double, double> noise_rates(double pi_p, double gamma);

// True iff gamma <= 2*pi_p - 1 (no robust estimator can bound the risk).
bool breakdown_violated(double pi_p, double gamma);

// pi_p (1 - pi_p) / (1 + gamma).
double kappa_pu(double pi_p, double gamma);

// columns x0..x{d-1},observed,truth with observed in {P,U}, truth in {1,0}
void write_pu_csv(const PUDataset& ds, const std::filesystem::path& path);
PUDataset read_pu_csv(const std::filesystem::path& path, double pi_p,
                      PuSetting setting);

}  // namespace pucl
