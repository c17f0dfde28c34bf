#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace pucl {

// One verification suite: a named bundle of checks with a JSON report.
// passed is the conjunction of every check in the report.
struct SuiteResult {
  std::string name;
  bool passed = false;
  nlohmann::json report;
};

// Theorem 1: Monte Carlo alignment-term bias of sCL-PU vs the closed form
// 2 kappa (rho_intra - rho_inter), five (pi_p, gamma, spread) configs.
SuiteResult verify_bias(std::uint64_t seed, long trials);

// Lemma 1: unbiasedness of both alignment estimators, gap >= -2se,
// monotone gap over gamma, exact zero at gamma = 0.
SuiteResult verify_variance(std::uint64_t seed, long trials);

// Positive-centroid lemma, exact subset enumeration vs closed form.
SuiteResult verify_centroid_lemma(std::uint64_t seed);

// Theorem 2: one-step puPL potential vs 16 phi*, k-means++ vs 21.55 phi*,
// and the paired puPL <= k-means++ comparison.
SuiteResult verify_pupl_bound(std::uint64_t seed, long trials);

// uPU unbiasedness over PU resamples, nnPU clipping identities, and the
// label-noise view (flip rates and breakdown table).
SuiteResult verify_upu(std::uint64_t seed, long resamples);

// Theorem 3 / Lemma 2 / Lemma 3 over constructed instances, plus the
// nearest-centroid vs affine-rule agreement.
SuiteResult verify_generalization(std::uint64_t seed, int instances);

// Analytic vs finite-difference gradients for every loss and the full
// encoder chain, plus the exact identity reductions and the gradient-bias
// mass comparison.
SuiteResult verify_gradients(std::uint64_t seed);

SuiteResult run_suite(const std::string& name, std::uint64_t seed, long trials);

}  // namespace pucl
