#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pucl/contrastive.hpp"
#include "pucl/matrix.hpp"
#include "pucl/rng.hpp"

namespace pucl {

// Synthetic class-conditional embedding distribution: Gaussian perturbation
// around a unit cluster direction followed by renormalization (a vMF-like
// stand-in for class marginals pushed through the encoder).
struct EmbeddingModel {
  int k = 2;
  Vector mu_pos;
  Vector mu_neg;
  double spread = 0.2;
  double pi_p = 0.5;
  double tau = 1.0;
};

Vector sample_embedding(const EmbeddingModel& model, bool positive,
                        RngStream& rng);

struct RhoEstimates {
  double rho_p = 0.0, rho_n = 0.0, rho_inter = 0.0;
  double rho_intra = 0.0;  // (rho_p + rho_n) / 2
  double se_p = 0.0, se_n = 0.0, se_inter = 0.0, se_intra = 0.0;
  long pairs = 0;
};

RhoEstimates estimate_rhos(const EmbeddingModel& model, long pairs,
                           RngStream& rng);

struct BiasReport {
  double bias_mc = 0.0;
  double stderr_mc = 0.0;
  double bias_predicted = 0.0;     // 2 kappa (rho_intra - rho_inter)
  double stderr_predicted = 0.0;   // propagated from the rho estimates
  double rho_intra = 0.0;
  double rho_inter = 0.0;
  double kappa = 0.0;
  double gamma = 0.0;              // realized n_L / n_U
  long trials = 0;
  // log-partition term measured separately; reported, not asserted
  double partition_bias_mc = 0.0;
  double partition_stderr = 0.0;
};

// Monte Carlo bias of the sCL-PU alignment term against the per-anchor
// ideal alignment term. Batches carry n_L = round(gamma * batch_unlabeled)
// labeled positives and batch_unlabeled mixture draws.
BiasReport mc_bias_scl_pu(const EmbeddingModel& model, double gamma,
                          int batch_unlabeled, long trials,
                          std::uint64_t seed);

struct VarianceGapPoint {
  double gamma = 0.0;
  double gap = 0.0;      // Var(ssCL) - Var(puCL), alignment estimators
  double stderr_ = 0.0;  // block stderr of the gap
  double mean_sscl = 0.0, se_sscl = 0.0;
  double mean_pucl = 0.0, se_pucl = 0.0;
  double ideal = 0.0, se_ideal = 0.0;  // model alignment expectation
};

// Alignment-estimator variance over fixed-composition multi-view batches
// (n_unlabeled_sources fixed, n_L = round(gamma * n_unlabeled_sources)).
std::vector<VarianceGapPoint> mc_variance_gap(
    const EmbeddingModel& model, const std::vector<double>& gammas,
    long trials, std::uint64_t seed, int n_unlabeled_sources = 20);

// Positive-centroid lemma, exhaustive side: average of phi(Z_P, mean(S))
// over all C(n_P, n_L) subsets S vs the closed-form factor times the
// optimal potential. Exact identity, n_P <= 12.
std::pair<double, double> exact_centroid_lemma_check(const Matrix& z_p,
                                                     int n_l);

struct GradientBiasMasses {
  double sscl_sameclass_mass = 0.0;
  double pucl_sameclass_mass = 0.0;
};

// Softmax mass P_{i,j} the repulsion term of each loss puts on same-class
// pairs, averaged over anchors. Requires full_labels.
GradientBiasMasses gradient_bias_compare(const MultiViewBatch& batch);

}  // namespace pucl
