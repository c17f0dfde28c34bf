#pragma once

#include <optional>
#include <vector>

#include "pucl/matrix.hpp"

namespace pucl {

// Multi-viewed batch of 2b embeddings. partner is the augmentation map a(i)
// (an involution without fixed points); labeled marks membership in the
// labeled-positive index set, and is per source: both views of a labeled
// source carry the flag. Builders produce unit rows; the losses themselves
// only assume nonzero rows (the similarity operator normalizes), which is
// what makes finite-difference checks over raw embeddings well defined.
struct MultiViewBatch {
  Matrix embeddings;  // 2b x k
  std::vector<int> partner;
  std::vector<char> labeled;
  std::optional<std::vector<int>> full_labels;  // oracle/test use only
  double tau = 0.5;

  int size() const { return static_cast<int>(embeddings.rows()); }
  void validate_structure() const;
};

// Stacks two aligned views [v1; v2] with partner i <-> i+b.
MultiViewBatch make_batch(const Matrix& view1, const Matrix& view2,
                          const std::vector<char>& source_labeled, double tau);

struct LossReport {
  double value = 0.0;
  Matrix grad;  // d value / d embeddings, same shape as embeddings
};

// (1/tau) * cos(z_i, z_j). Throws kZeroVector on (near-)zero input.
double similarity(const Vector& z_i, const Vector& z_j, double tau);

// Z(z_i) = sum_{j != i} exp(z_i . z_j), plain sum (tests compare against it).
double partition_sum(const MultiViewBatch& batch, int i);

LossReport loss_sscl(const MultiViewBatch& batch);
LossReport loss_scl_pu(const MultiViewBatch& batch);
LossReport loss_pucl(const MultiViewBatch& batch);
LossReport loss_scl_full(const MultiViewBatch& batch);  // needs full_labels
LossReport loss_mcl(const MultiViewBatch& batch, double lambda);
LossReport loss_dcl(const MultiViewBatch& batch, double lambda);

enum class LossKind { kSscl, kSclPu, kPucl, kMcl, kDcl };
LossReport loss_by_kind(const MultiViewBatch& batch, LossKind kind, double lambda);

const char* loss_kind_name(LossKind kind);
LossKind loss_kind_from_name(const std::string& name);

// Asymptotic alignment/uniformity decomposition at tau = 1 over explicit
// finite augmentation sets: l_align = E ||z - z_a||^2, l_unif = E log Z(z)
// with Z(z) = exp(z^T z_a) + exp(z^T z'), and the reconstruction
// 0.5*l_align + l_unif - 1. aug_embeddings[s] holds the embedded
// augmentation set of sample s; mass[s] its probability (sums to 1).
struct SplitReport {
  double l_align = 0.0;
  double l_unif = 0.0;
  double reconstructed = 0.0;
};
SplitReport alignment_uniformity_split(const std::vector<Matrix>& aug_embeddings,
                                       const std::vector<double>& mass);

}  // namespace pucl
