#include "pucl/contrastive.hpp"

#include <cmath>
#include <limits>

#include "pucl/error.hpp"

namespace pucl {

namespace {

// Cosine similarities scaled by 1/tau; diagonal left at 0 and never read.
struct SimTable {
  Matrix s;          // s(i,j) = (1/tau) cos(z_i, z_j)
  Matrix unit;       // row-normalized embeddings
  Vector norms;
  double tau;
};

SimTable build_sims(const MultiViewBatch& batch) {
  const int n = batch.size();
  SimTable t;
  t.tau = batch.tau;
  t.norms.resize(n);
  t.unit.resize(n, batch.embeddings.cols());
  for (int i = 0; i < n; ++i) {
    double norm = batch.embeddings.row(i).norm();
    if (norm <= 1e-12)
      fail(ErrorKind::kZeroVector, "contrastive loss: zero embedding row");
    t.norms(i) = norm;
    t.unit.row(i) = batch.embeddings.row(i) / norm;
  }
  t.s = (t.unit * t.unit.transpose()) / batch.tau;
  t.s.diagonal().setZero();
  return t;
}

// log sum_{j != i} exp(s_ij), max-subtracted.
double log_partition(const SimTable& t, int i) {
  const int n = static_cast<int>(t.s.rows());
  double m = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j)
    if (j != i) m = std::max(m, t.s(i, j));
  double acc = 0.0;
  for (int j = 0; j < n; ++j)
    if (j != i) acc += std::exp(t.s(i, j) - m);
  return m + std::log(acc);
}

// Chain rule through s_ij = (1/tau) z_i^T z_j / (|z_i||z_j|) for a full
// matrix of dL/ds coefficients (diagonal ignored).
Matrix chain_to_embeddings(const SimTable& t, const Matrix& dl_ds) {
  const int n = static_cast<int>(t.s.rows());
  Matrix grad = Matrix::Zero(n, t.unit.cols());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double g = dl_ds(i, j);
      if (g == 0.0) continue;
      double cos_ij = t.s(i, j) * t.tau;
      grad.row(i) +=
          g / (t.tau * t.norms(i)) * (t.unit.row(j) - cos_ij * t.unit.row(i));
      grad.row(j) +=
          g / (t.tau * t.norms(j)) * (t.unit.row(i) - cos_ij * t.unit.row(j));
    }
  }
  return grad;
}

// Attraction weight rows for the log-partition family: each anchor i gets
// weights w_ij summing to 1 over its attraction set.
enum class Attraction { kSelfAug, kLabeledSet, kGroupSet, kClassSet };

Matrix attraction_weights(const MultiViewBatch& batch, Attraction mode) {
  const int n = batch.size();
  Matrix w = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> set;
    bool use_self = false;
    switch (mode) {
      case Attraction::kSelfAug:
        use_self = true;
        break;
      case Attraction::kLabeledSet:  // puCL: labeled anchors over P \ i
        if (batch.labeled[i]) {
          for (int j = 0; j < n; ++j)
            if (j != i && batch.labeled[j]) set.push_back(j);
          use_self = set.empty();  // singleton-label degeneracy
        } else {
          use_self = true;
        }
        break;
      case Attraction::kGroupSet:  // sCL-PU: own group (P or U) minus i
        for (int j = 0; j < n; ++j)
          if (j != i && batch.labeled[j] == batch.labeled[i]) set.push_back(j);
        use_self = set.empty();
        break;
      case Attraction::kClassSet:  // fully supervised sCL
        for (int j = 0; j < n; ++j)
          if (j != i && (*batch.full_labels)[j] == (*batch.full_labels)[i])
            set.push_back(j);
        use_self = set.empty();
        break;
    }
    if (use_self) {
      w(i, batch.partner[i]) = 1.0;
    } else {
      double v = 1.0 / static_cast<double>(set.size());
      for (int j : set) w(i, j) = v;
    }
  }
  return w;
}

LossReport weighted_info_nce(const MultiViewBatch& batch, const Matrix& w) {
  const SimTable t = build_sims(batch);
  const int n = batch.size();
  double value = 0.0;
  Matrix dl_ds = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double log_z = log_partition(t, i);
    double attract = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i && w(i, j) != 0.0) attract += w(i, j) * t.s(i, j);
    value += -(attract - log_z);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double p_ij = std::exp(t.s(i, j) - log_z);
      dl_ds(i, j) = -(w(i, j) - p_ij) / n;
    }
  }
  return LossReport{value / n, chain_to_embeddings(t, dl_ds)};
}

}  // namespace

void MultiViewBatch::validate_structure() const {
  const int n = size();
  if (n < 2 || n % 2 != 0)
    fail(ErrorKind::kInvalidArgs, "batch: need an even number >= 2 of views");
  if (static_cast<int>(partner.size()) != n ||
      static_cast<int>(labeled.size()) != n)
    fail(ErrorKind::kInvalidArgs, "batch: partner/labeled size mismatch");
  if (tau <= 0.0) fail(ErrorKind::kInvalidArgs, "batch: tau must be > 0");
  for (int i = 0; i < n; ++i) {
    int a = partner[i];
    if (a < 0 || a >= n || a == i || partner[a] != i)
      fail(ErrorKind::kInvalidArgs, "batch: partner map is not an involution");
    if (labeled[i] != labeled[a])
      fail(ErrorKind::kInvalidArgs,
           "batch: both views of a source must share the labeled flag");
  }
  if (full_labels && static_cast<int>(full_labels->size()) != n)
    fail(ErrorKind::kInvalidArgs, "batch: full_labels size mismatch");
}

MultiViewBatch make_batch(const Matrix& view1, const Matrix& view2,
                          const std::vector<char>& source_labeled, double tau) {
  const int b = static_cast<int>(view1.rows());
  if (view2.rows() != b || view1.cols() != view2.cols() ||
      static_cast<int>(source_labeled.size()) != b)
    fail(ErrorKind::kDimMismatch, "make_batch: view shapes disagree");
  MultiViewBatch batch;
  batch.tau = tau;
  batch.embeddings.resize(2 * b, view1.cols());
  batch.embeddings.topRows(b) = view1;
  batch.embeddings.bottomRows(b) = view2;
  batch.partner.resize(2 * b);
  batch.labeled.resize(2 * b);
  for (int i = 0; i < b; ++i) {
    batch.partner[i] = i + b;
    batch.partner[i + b] = i;
    batch.labeled[i] = source_labeled[i];
    batch.labeled[i + b] = source_labeled[i];
  }
  batch.validate_structure();
  return batch;
}

double similarity(const Vector& z_i, const Vector& z_j, double tau) {
  if (tau <= 0.0) fail(ErrorKind::kInvalidArgs, "similarity: tau must be > 0");
  double ni = z_i.norm();
  double nj = z_j.norm();
  if (ni <= 1e-12 || nj <= 1e-12)
    fail(ErrorKind::kZeroVector, "similarity: zero vector");
  return z_i.dot(z_j) / (ni * nj * tau);
}

double partition_sum(const MultiViewBatch& batch, int i) {
  const SimTable t = build_sims(batch);
  double acc = 0.0;
  for (int j = 0; j < batch.size(); ++j)
    if (j != i) acc += std::exp(t.s(i, j));
  return acc;
}

LossReport loss_sscl(const MultiViewBatch& batch) {
  batch.validate_structure();
  return weighted_info_nce(batch, attraction_weights(batch, Attraction::kSelfAug));
}

LossReport loss_scl_pu(const MultiViewBatch& batch) {
  batch.validate_structure();
  return weighted_info_nce(batch, attraction_weights(batch, Attraction::kGroupSet));
}

LossReport loss_pucl(const MultiViewBatch& batch) {
  batch.validate_structure();
  return weighted_info_nce(batch,
                           attraction_weights(batch, Attraction::kLabeledSet));
}

LossReport loss_scl_full(const MultiViewBatch& batch) {
  batch.validate_structure();
  if (!batch.full_labels)
    fail(ErrorKind::kMissingLabels, "loss_scl_full: full_labels required");
  return weighted_info_nce(batch, attraction_weights(batch, Attraction::kClassSet));
}

LossReport loss_mcl(const MultiViewBatch& batch, double lambda) {
  if (lambda < 0.0 || lambda > 1.0)
    fail(ErrorKind::kInvalidLambda, "loss_mcl: lambda must be in [0,1]");
  if (lambda == 0.0) return loss_sscl(batch);
  if (lambda == 1.0) return loss_scl_pu(batch);
  LossReport sup = loss_scl_pu(batch);
  LossReport unsup = loss_sscl(batch);
  return LossReport{lambda * sup.value + (1.0 - lambda) * unsup.value,
                    lambda * sup.grad + (1.0 - lambda) * unsup.grad};
}

LossReport loss_dcl(const MultiViewBatch& batch, double lambda) {
  if (lambda < 0.0 || lambda >= 1.0)
    fail(ErrorKind::kInvalidLambda, "loss_dcl: lambda must be in [0,1)");
  batch.validate_structure();
  const SimTable t = build_sims(batch);
  const int n = batch.size();
  // Lowest possible true negative sum for unit-norm rows; keeps the log
  // argument positive when the debiased estimate undershoots.
  const double floor = (n - 2) * std::exp(-1.0 / batch.tau);
  double value = 0.0;
  Matrix dl_ds = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int p = batch.partner[i];
    double sum_u = 0.0, sum_p = 0.0;
    int count_p = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i || j == p) continue;
      double e = std::exp(t.s(i, j));
      sum_u += e;
      if (batch.labeled[j]) {
        sum_p += e;
        ++count_p;
      }
    }
    const double n_u = static_cast<double>(n - 2);
    double r = count_p > 0
                   ? (sum_u - lambda * (n_u / count_p) * sum_p) / (1.0 - lambda)
                   : sum_u / (1.0 - lambda);
    bool clipped = r < floor;
    double r_used = clipped ? floor : r;
    double z = std::exp(t.s(i, p)) + r_used;
    value += -(t.s(i, p) - std::log(z));
    dl_ds(i, p) += -(1.0 - std::exp(t.s(i, p)) / z) / n;
    if (!clipped) {
      for (int j = 0; j < n; ++j) {
        if (j == i || j == p) continue;
        double alpha =
            (1.0 - (batch.labeled[j] && count_p > 0 ? lambda * n_u / count_p
                                                    : 0.0)) /
            (1.0 - lambda);
        dl_ds(i, j) += alpha * std::exp(t.s(i, j)) / z / n;
      }
    }
  }
  return LossReport{value / n, chain_to_embeddings(t, dl_ds)};
}

LossReport loss_by_kind(const MultiViewBatch& batch, LossKind kind,
                        double lambda) {
  switch (kind) {
    case LossKind::kSscl:
      return loss_sscl(batch);
    case LossKind::kSclPu:
      return loss_scl_pu(batch);
    case LossKind::kPucl:
      return loss_pucl(batch);
    case LossKind::kMcl:
      return loss_mcl(batch, lambda);
    case LossKind::kDcl:
      return loss_dcl(batch, lambda);
  }
  fail(ErrorKind::kInvalidArgs, "loss_by_kind: unknown kind");
}

const char* loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::kSscl: return "sscl";
    case LossKind::kSclPu: return "scl-pu";
    case LossKind::kPucl: return "pucl";
    case LossKind::kMcl: return "mcl";
    case LossKind::kDcl: return "dcl";
  }
  return "?";
}

LossKind loss_kind_from_name(const std::string& name) {
  if (name == "sscl") return LossKind::kSscl;
  if (name == "scl-pu" || name == "sclpu") return LossKind::kSclPu;
  if (name == "pucl") return LossKind::kPucl;
  if (name == "mcl") return LossKind::kMcl;
  if (name == "dcl") return LossKind::kDcl;
  fail(ErrorKind::kInvalidArgs, "unknown loss kind: " + name);
}

SplitReport alignment_uniformity_split(const std::vector<Matrix>& aug_embeddings,
                                       const std::vector<double>& mass) {
  const std::size_t n = aug_embeddings.size();
  if (n == 0 || mass.size() != n)
    fail(ErrorKind::kInvalidArgs, "split: need one mass per sample");
  for (const Matrix& set : aug_embeddings)
    if (set.rows() == 0)
      fail(ErrorKind::kEmptyAugmentationSet, "split: empty augmentation set");

  SplitReport rep;
  for (std::size_t s = 0; s < n; ++s) {
    const Matrix& a = aug_embeddings[s];
    const long m = a.rows();
    double acc = 0.0;
    for (long u = 0; u < m; ++u)
      for (long v = 0; v < m; ++v) acc += (a.row(u) - a.row(v)).squaredNorm();
    rep.l_align += mass[s] * acc / static_cast<double>(m * m);
  }
  for (std::size_t s = 0; s < n; ++s) {
    const Matrix& a = aug_embeddings[s];
    const long m = a.rows();
    for (std::size_t s2 = 0; s2 < n; ++s2) {
      const Matrix& b = aug_embeddings[s2];
      const long m2 = b.rows();
      double acc = 0.0;
      for (long u = 0; u < m; ++u)
        for (long v = 0; v < m; ++v)
          for (long w = 0; w < m2; ++w) {
            double e1 = std::exp(a.row(u).dot(a.row(v)));
            double e2 = std::exp(a.row(u).dot(b.row(w)));
            acc += std::log(e1 + e2);
          }
      rep.l_unif += mass[s] * mass[s2] * acc / static_cast<double>(m * m * m2);
    }
  }
  rep.reconstructed = 0.5 * rep.l_align + rep.l_unif - 1.0;
  return rep;
}

}  // namespace pucl
