#include "pucl/theory_lab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "pucl/error.hpp"
#include "pucl/pu_data.hpp"
#include "pucl/pupl.hpp"

namespace pucl {

namespace {

double mean_of(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

double stderr_of(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1) /
                   static_cast<double>(xs.size()));
}

double variance_of(const std::vector<double>& xs) {
  double mean = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(xs.size() - 1);
}

double sim_of(const Vector& a, const Vector& b, double tau) {
  return a.dot(b) / tau;  // model embeddings are unit rows
}

}  // namespace

Vector sample_embedding(const EmbeddingModel& model, bool positive,
                        RngStream& rng) {
  const Vector& mu = positive ? model.mu_pos : model.mu_neg;
  Vector z(model.k);
  for (int i = 0; i < model.k; ++i)
    z(i) = mu(i) + model.spread * rng.normal();
  double norm = z.norm();
  if (norm <= 1e-12) {
    // vanishing perturbation sum; fall back to the cluster direction
    return mu;
  }
  return z / norm;
}

RhoEstimates estimate_rhos(const EmbeddingModel& model, long pairs,
                           RngStream& rng) {
  if (pairs < 2) fail(ErrorKind::kInvalidArgs, "estimate_rhos: pairs >= 2");
  std::vector<double> sp(pairs), sn(pairs), si(pairs);
  for (long t = 0; t < pairs; ++t) {
    Vector p1 = sample_embedding(model, true, rng);
    Vector p2 = sample_embedding(model, true, rng);
    Vector n1 = sample_embedding(model, false, rng);
    Vector n2 = sample_embedding(model, false, rng);
    sp[t] = sim_of(p1, p2, model.tau);
    sn[t] = sim_of(n1, n2, model.tau);
    si[t] = sim_of(p1, n2, model.tau);
  }
  RhoEstimates r;
  r.pairs = pairs;
  r.rho_p = mean_of(sp);
  r.rho_n = mean_of(sn);
  r.rho_inter = mean_of(si);
  r.rho_intra = 0.5 * (r.rho_p + r.rho_n);
  r.se_p = stderr_of(sp, r.rho_p);
  r.se_n = stderr_of(sn, r.rho_n);
  r.se_inter = stderr_of(si, r.rho_inter);
  r.se_intra = 0.5 * std::hypot(r.se_p, r.se_n);
  return r;
}

BiasReport mc_bias_scl_pu(const EmbeddingModel& model, double gamma,
                          int batch_unlabeled, long trials,
                          std::uint64_t seed) {
  if (trials < 100 || batch_unlabeled < 2 || gamma < 0.0)
    fail(ErrorKind::kInvalidConfig, "mc_bias_scl_pu: invalid configuration");
  const int n_u = batch_unlabeled;
  const int n_l = static_cast<int>(std::lround(gamma * n_u));
  if (n_l == 1)
    fail(ErrorKind::kInvalidConfig,
         "mc_bias_scl_pu: a single labeled anchor has no labeled partner");
  const int n = n_l + n_u;
  const double gamma_actual = static_cast<double>(n_l) / n_u;

  RngStream root(seed, 30);
  RngStream rho_rng = root.child(0);
  RhoEstimates rho = estimate_rhos(model, 2000000, rho_rng);

  std::vector<double> bias_samples(trials);
  std::vector<double> partition_samples(trials);
  std::vector<Vector> z(n);
  std::vector<char> positive(n);
  for (long t = 0; t < trials; ++t) {
    RngStream rng = root.child(static_cast<std::uint64_t>(t) + 1);
    for (int i = 0; i < n_l; ++i) {
      positive[i] = 1;
      z[i] = sample_embedding(model, true, rng);
    }
    for (int i = n_l; i < n; ++i) {
      positive[i] = rng.uniform01() < model.pi_p;
      z[i] = sample_embedding(model, positive[i], rng);
    }
    // sCL-PU alignment term per anchor: own group mean similarity
    double att_total = 0.0;
    double ideal_total = 0.0;
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      int count = 0;
      const bool lab_i = i < n_l;
      for (int j = 0; j < n; ++j) {
        if (j == i || (j < n_l) != lab_i) continue;
        acc += sim_of(z[i], z[j], model.tau);
        ++count;
      }
      att_total += acc / count;
      Vector partner = sample_embedding(model, positive[i], rng);
      ideal_total += sim_of(z[i], partner, model.tau);
    }
    bias_samples[t] = (ideal_total - att_total) / n;

    // log-partition term, measured separately (see module notes): the PU
    // batch partition vs an ideal batch with the same candidate count
    // (one same-class partner + n-2 opposite-class draws per anchor).
    std::vector<Vector> pool_p(n - 2), pool_n(n - 2);
    for (int i = 0; i < n - 2; ++i) pool_p[i] = sample_embedding(model, true, rng);
    for (int i = 0; i < n - 2; ++i) pool_n[i] = sample_embedding(model, false, rng);
    double logz_pu = 0.0, logz_ideal = 0.0;
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) acc += std::exp(sim_of(z[i], z[j], model.tau));
      logz_pu += std::log(acc);
      Vector partner = sample_embedding(model, positive[i], rng);
      double acc_ideal = std::exp(sim_of(z[i], partner, model.tau));
      const std::vector<Vector>& pool = positive[i] ? pool_n : pool_p;
      for (const Vector& other : pool)
        acc_ideal += std::exp(sim_of(z[i], other, model.tau));
      logz_ideal += std::log(acc_ideal);
    }
    partition_samples[t] = (logz_pu - logz_ideal) / n;
  }

  BiasReport rep;
  rep.trials = trials;
  rep.gamma = gamma_actual;
  rep.kappa = kappa_pu(model.pi_p, gamma_actual);
  rep.rho_intra = rho.rho_intra;
  rep.rho_inter = rho.rho_inter;
  rep.bias_predicted = 2.0 * rep.kappa * (rho.rho_intra - rho.rho_inter);
  rep.stderr_predicted =
      2.0 * rep.kappa * std::hypot(rho.se_intra, rho.se_inter);
  rep.bias_mc = mean_of(bias_samples);
  rep.stderr_mc = stderr_of(bias_samples, rep.bias_mc);
  rep.partition_bias_mc = mean_of(partition_samples);
  rep.partition_stderr = stderr_of(partition_samples, rep.partition_bias_mc);
  return rep;
}

std::vector<VarianceGapPoint> mc_variance_gap(const EmbeddingModel& model,
                                              const std::vector<double>& gammas,
                                              long trials, std::uint64_t seed,
                                              int n_unlabeled_sources) {
  if (trials < 100 || n_unlabeled_sources < 2)
    fail(ErrorKind::kInvalidConfig, "mc_variance_gap: invalid configuration");
  for (std::size_t i = 1; i < gammas.size(); ++i)
    if (gammas[i] < gammas[i - 1])
      fail(ErrorKind::kInvalidConfig, "mc_variance_gap: gammas must ascend");

  RngStream root(seed, 31);
  RngStream rho_rng = root.child(0);
  RhoEstimates rho = estimate_rhos(model, 2000000, rho_rng);

  const int blocks = 20;
  std::vector<VarianceGapPoint> out;
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    const int n_u = n_unlabeled_sources;
    const int n_l = static_cast<int>(std::lround(gammas[gi] * n_u));
    const int b = n_l + n_u;
    RngStream grng = root.child(1000 + gi);

    std::vector<double> a_ss(trials), a_pu(trials);
    std::vector<Vector> v1(b), v2(b);
    std::vector<char> positive(b);
    for (long t = 0; t < trials; ++t) {
      RngStream rng = grng.child(static_cast<std::uint64_t>(t));
      for (int i = 0; i < b; ++i) {
        positive[i] = i < n_l ? 1 : (rng.uniform01() < model.pi_p);
        v1[i] = sample_embedding(model, positive[i], rng);
        v2[i] = sample_embedding(model, positive[i], rng);
      }
      // ssCL alignment estimator over 2b anchors
      double ss = 0.0;
      for (int i = 0; i < b; ++i) ss += 2.0 * sim_of(v1[i], v2[i], model.tau);
      ss /= 2.0 * b;
      a_ss[t] = ss;
      if (n_l == 0) {
        a_pu[t] = ss;
        continue;
      }
      // puCL: the 2 n_l labeled views average over the other labeled views
      double pu = 0.0;
      std::vector<const Vector*> lab;
      lab.reserve(2 * n_l);
      for (int i = 0; i < n_l; ++i) lab.push_back(&v1[i]);
      for (int i = 0; i < n_l; ++i) lab.push_back(&v2[i]);
      for (std::size_t i = 0; i < lab.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < lab.size(); ++j)
          if (j != i) acc += sim_of(*lab[i], *lab[j], model.tau);
        pu += acc / static_cast<double>(lab.size() - 1);
      }
      for (int i = n_l; i < b; ++i) pu += 2.0 * sim_of(v1[i], v2[i], model.tau);
      a_pu[t] = pu / (2.0 * b);
    }

    VarianceGapPoint point;
    point.gamma = static_cast<double>(n_l) / n_u;
    point.mean_sscl = mean_of(a_ss);
    point.se_sscl = stderr_of(a_ss, point.mean_sscl);
    point.mean_pucl = mean_of(a_pu);
    point.se_pucl = stderr_of(a_pu, point.mean_pucl);
    const double w_l = static_cast<double>(n_l) / b;
    point.ideal = w_l * rho.rho_p +
                  (1.0 - w_l) * (model.pi_p * rho.rho_p +
                                 (1.0 - model.pi_p) * rho.rho_n);
    double dp = w_l + (1.0 - w_l) * model.pi_p;
    double dn = (1.0 - w_l) * (1.0 - model.pi_p);
    point.se_ideal = std::hypot(dp * rho.se_p, dn * rho.se_n);

    const long per_block = trials / blocks;
    std::vector<double> block_gaps;
    for (int bl = 0; bl < blocks; ++bl) {
      std::vector<double> ss_blk(a_ss.begin() + bl * per_block,
                                 a_ss.begin() + (bl + 1) * per_block);
      std::vector<double> pu_blk(a_pu.begin() + bl * per_block,
                                 a_pu.begin() + (bl + 1) * per_block);
      block_gaps.push_back(variance_of(ss_blk) - variance_of(pu_blk));
    }
    point.gap = mean_of(block_gaps);
    point.stderr_ = stderr_of(block_gaps, point.gap);
    out.push_back(point);
  }
  return out;
}

std::pair<double, double> exact_centroid_lemma_check(const Matrix& z_p,
                                                     int n_l) {
  const int n_p = static_cast<int>(z_p.rows());
  if (n_p > 12) fail(ErrorKind::kTooLarge, "exact_centroid_lemma_check: n_P > 12");
  if (n_l < 1 || n_l > n_p)
    fail(ErrorKind::kInvalidArgs, "exact_centroid_lemma_check: need 1 <= n_L <= n_P");

  Vector full_mean = z_p.colwise().mean().transpose();
  double phi_star = 0.0;
  for (int i = 0; i < n_p; ++i)
    phi_star += (z_p.row(i).transpose() - full_mean).squaredNorm();

  double lhs = 0.0;
  long count = 0;
  for (std::uint32_t mask = 0; mask < (1u << n_p); ++mask) {
    if (std::popcount(mask) != n_l) continue;
    Vector mu = Vector::Zero(z_p.cols());
    for (int i = 0; i < n_p; ++i)
      if (mask & (1u << i)) mu += z_p.row(i).transpose();
    mu /= static_cast<double>(n_l);
    double phi = 0.0;
    for (int i = 0; i < n_p; ++i)
      phi += (z_p.row(i).transpose() - mu).squaredNorm();
    lhs += phi;
    ++count;
  }
  lhs /= static_cast<double>(count);

  double factor =
      n_l == n_p ? 1.0
                 : 1.0 + static_cast<double>(n_p - n_l) /
                             (static_cast<double>(n_l) * (n_p - 1));
  return {lhs, factor * phi_star};
}

GradientBiasMasses gradient_bias_compare(const MultiViewBatch& batch) {
  batch.validate_structure();
  if (!batch.full_labels)
    fail(ErrorKind::kMissingLabels, "gradient_bias_compare: full_labels required");
  const int n = batch.size();
  const std::vector<int>& cls = *batch.full_labels;

  Matrix unit(n, batch.embeddings.cols());
  for (int i = 0; i < n; ++i) {
    double norm = batch.embeddings.row(i).norm();
    if (norm <= 1e-12)
      fail(ErrorKind::kZeroVector, "gradient_bias_compare: zero row");
    unit.row(i) = batch.embeddings.row(i) / norm;
  }
  Matrix s = (unit * unit.transpose()) / batch.tau;

  GradientBiasMasses masses;
  for (int i = 0; i < n; ++i) {
    double z = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) z += std::exp(s(i, j));
    // ssCL repulsion: everything but the anchor and its partner
    double ss = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i && j != batch.partner[i] && cls[j] == cls[i])
        ss += std::exp(s(i, j)) / z;
    masses.sscl_sameclass_mass += ss;
    // puCL repulsion: labeled anchors repel only the unlabeled indices
    double pu = 0.0;
    if (batch.labeled[i]) {
      bool has_other_labeled = false;
      for (int j = 0; j < n; ++j)
        if (j != i && batch.labeled[j]) has_other_labeled = true;
      if (has_other_labeled) {
        for (int j = 0; j < n; ++j)
          if (j != i && !batch.labeled[j] && cls[j] == cls[i])
            pu += std::exp(s(i, j)) / z;
      } else {
        pu = ss;  // singleton rule: anchor behaves as unlabeled
      }
    } else {
      pu = ss;
    }
    masses.pucl_sameclass_mass += pu;
  }
  masses.sscl_sameclass_mass /= n;
  masses.pucl_sameclass_mass /= n;
  return masses;
}

}  // namespace pucl
