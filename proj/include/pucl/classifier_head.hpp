#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pucl/matrix.hpp"

namespace pucl {

struct LinearHead {
  Vector w;
  double b = 0.0;

  double score(const Vector& z) const { return w.dot(z) + b; }
  Vector scores(const Matrix& z) const;

  void save_json(const std::filesystem::path& path) const;
  static LinearHead load_json(const std::filesystem::path& path);
};

struct HeadConfig {
  double lr = 0.5;
  int epochs = 500;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
};

// Full-batch gradient descent on logistic loss + L2 (bias excluded from the
// penalty), starting from the zero head. Throws kSingleClass unless both
// labels occur.
LinearHead train_ce(const Matrix& z, const std::vector<int>& labels,
                    const HeadConfig& cfg,
                    std::vector<double>* loss_trace = nullptr);

struct RiskBreakdown {
  double r_p_plus = 0.0;   // mean l(score, 1) over labeled positives
  double r_p_minus = 0.0;  // mean l(score, 0) over labeled positives
  double r_u_minus = 0.0;  // mean l(score, 0) over unlabeled
  double combined = 0.0;
  bool clipped = false;
};

// uPU: pi R_p^+ + [R_u^- - pi R_p^-]
RiskBreakdown risk_upu(const LinearHead& head, const Matrix& z_p,
                       const Matrix& z_u, double pi_p);

// nnPU: pi R_p^+ + max{0, R_u^- - pi R_p^-}
RiskBreakdown risk_nnpu(const LinearHead& head, const Matrix& z_p,
                        const Matrix& z_u, double pi_p);

// Gradient descent on the nnPU risk; the clipped branch contributes zero
// gradient.
LinearHead train_nnpu(const Matrix& z_p, const Matrix& z_u, double pi_p,
                      const HeadConfig& cfg,
                      std::vector<double>* risk_trace = nullptr);

// argmin-distance labels; identical to the affine rule
// argmax_mu (mu^T z - |mu|^2 / 2), ties to P.
std::vector<int> nearest_centroid_classify(const Matrix& z, const Vector& mu_p,
                                           const Vector& mu_n);

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

Metrics evaluate(const std::vector<int>& pred, const std::vector<int>& truth);

// log(1 + exp(-s)) for y=1, log(1 + exp(s)) for y=0, overflow-safe.
double logistic_loss(double score, int label);

}  // namespace pucl
