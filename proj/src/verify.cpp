#include "pucl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pucl/classifier_head.hpp"
#include "pucl/config.hpp"
#include "pucl/contrastive.hpp"
#include "pucl/encoder.hpp"
#include "pucl/error.hpp"
#include "pucl/generalization.hpp"
#include "pucl/numerics.hpp"
#include "pucl/pu_data.hpp"
#include "pucl/pupl.hpp"
#include "pucl/theory_lab.hpp"

namespace pucl {

using nlohmann::json;

namespace {

struct SuiteBuilder {
  std::string name;
  bool passed = true;
  json checks = json::array();

  void add(const std::string& check, bool ok, json details = {}) {
    json entry;
    entry["check"] = check;
    entry["passed"] = ok;
    if (!details.is_null()) entry["details"] = details;
    checks.push_back(entry);
    passed = passed && ok;
  }

  SuiteResult finish() const {
    SuiteResult r;
    r.name = name;
    r.passed = passed;
    r.report = {{"suite", name}, {"passed", passed}, {"checks", checks}};
    return r;
  }
};

Matrix random_unit_rows(int rows, int cols, RngStream& rng) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.normal();
  return normalize_rows(m);
}

MultiViewBatch random_batch(int sources, int k, double tau, double label_prob,
                            RngStream& rng, bool with_full_labels = false) {
  std::vector<char> labeled(sources);
  std::vector<int> cls(sources);
  for (int i = 0; i < sources; ++i) {
    cls[i] = rng.uniform01() < 0.5 ? 1 : 0;
    labeled[i] = cls[i] == 1 && rng.uniform01() < label_prob;
  }
  Matrix v1 = random_unit_rows(sources, k, rng);
  Matrix v2 = random_unit_rows(sources, k, rng);
  MultiViewBatch batch = make_batch(v1, v2, labeled, tau);
  if (with_full_labels) {
    std::vector<int> full(2 * sources);
    for (int i = 0; i < sources; ++i) full[i] = full[i + sources] = cls[i];
    batch.full_labels = full;
  }
  return batch;
}

double max_rel_err(const Vector& a, const Vector& b) {
  double scale = std::max({a.lpNorm<Eigen::Infinity>(),
                           b.lpNorm<Eigen::Infinity>(), 1e-10});
  return (a - b).lpNorm<Eigen::Infinity>() / scale;
}

Vector flatten(const Matrix& m) {
  Vector v(m.size());
  long at = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) v(at++) = m(r, c);
  return v;
}

double loss_value_at(const MultiViewBatch& proto, LossKind kind, double lambda,
                     const Vector& flat_embeddings) {
  MultiViewBatch batch = proto;
  long at = 0;
  for (Eigen::Index r = 0; r < batch.embeddings.rows(); ++r)
    for (Eigen::Index c = 0; c < batch.embeddings.cols(); ++c)
      batch.embeddings(r, c) = flat_embeddings(at++);
  if (kind == LossKind::kMcl) return loss_mcl(batch, lambda).value;
  if (kind == LossKind::kDcl) return loss_dcl(batch, lambda).value;
  return loss_by_kind(batch, kind, lambda).value;
}

struct GradCase {
  const char* name;
  LossKind kind;
  double lambda;
  bool full;  // use loss_scl_full
};

constexpr GradCase kGradCases[] = {
    {"sscl", LossKind::kSscl, 0.0, false},
    {"scl-pu", LossKind::kSclPu, 0.0, false},
    {"pucl", LossKind::kPucl, 0.0, false},
    {"scl", LossKind::kSscl, 0.0, true},
    {"mcl", LossKind::kMcl, 0.3, false},
    {"dcl", LossKind::kDcl, 0.1, false},
};

LossReport eval_case(const MultiViewBatch& batch, const GradCase& gc) {
  if (gc.full) return loss_scl_full(batch);
  return loss_by_kind(batch, gc.kind, gc.lambda);
}

double eval_case_value(const MultiViewBatch& proto, const GradCase& gc,
                       const Vector& flat) {
  MultiViewBatch batch = proto;
  long at = 0;
  for (Eigen::Index r = 0; r < batch.embeddings.rows(); ++r)
    for (Eigen::Index c = 0; c < batch.embeddings.cols(); ++c)
      batch.embeddings(r, c) = flat(at++);
  return eval_case(batch, gc).value;
}

}  // namespace

SuiteResult verify_gradients(std::uint64_t seed) {
  SuiteBuilder suite{"gradients"};
  RngStream root(seed, 50);

  // embedding-space gradients vs central differences
  for (const GradCase& gc : kGradCases) {
    double worst = 0.0;
    for (int b : {2, 4, 8}) {
      for (int s = 0; s < 3; ++s) {
        RngStream rng = root.child(1000 + b * 10 + s);
        MultiViewBatch batch = random_batch(b, 4, 0.5, 0.5, rng, true);
        LossReport rep = eval_case(batch, gc);
        Vector flat = flatten(batch.embeddings);
        Vector fd = finite_diff_grad(
            [&](const Vector& x) { return eval_case_value(batch, gc, x); },
            flat);
        worst = std::max(worst, max_rel_err(flatten(rep.grad), fd));
      }
    }
    suite.add(std::string("grad_embeddings_") + gc.name, worst <= 1e-5,
              {{"max_rel_err", worst}});
  }

  // full encoder chain: d loss / d parameters vs central differences
  for (const GradCase& gc : kGradCases) {
    double worst = 0.0;
    for (int b : {2, 4, 6}) {
      for (int s = 0; s < 3; ++s) {
        RngStream rng = root.child(2000 + b * 10 + s);
        MlpEncoder enc = MlpEncoder::random_init({3, 5, 4}, Activation::kTanh,
                                                 true, rng);
        Matrix inputs(2 * b, 3);
        for (Eigen::Index r = 0; r < inputs.rows(); ++r)
          for (int c = 0; c < 3; ++c) inputs(r, c) = rng.normal();
        std::vector<char> labeled(b);
        std::vector<int> cls(b);
        for (int i = 0; i < b; ++i) {
          cls[i] = rng.uniform01() < 0.5 ? 1 : 0;
          labeled[i] = cls[i] == 1 && rng.uniform01() < 0.6;
        }
        auto chain_value = [&](const MlpEncoder& e) {
          Matrix z = e.encode(inputs);
          MultiViewBatch batch =
              make_batch(z.topRows(b), z.bottomRows(b), labeled, 0.5);
          std::vector<int> full(2 * b);
          for (int i = 0; i < b; ++i) full[i] = full[i + b] = cls[i];
          batch.full_labels = full;
          return eval_case(batch, gc);
        };
        LossReport rep = chain_value(enc);
        MlpEncoder::Gradients grads = [&] {
          Matrix z = enc.encode(inputs);
          MultiViewBatch batch =
              make_batch(z.topRows(b), z.bottomRows(b), labeled, 0.5);
          std::vector<int> full(2 * b);
          for (int i = 0; i < b; ++i) full[i] = full[i + b] = cls[i];
          batch.full_labels = full;
          return enc.backprop(inputs, eval_case(batch, gc).grad);
        }();
        Vector analytic(enc.param_count());
        {
          long at = 0;
          for (std::size_t l = 0; l < grads.dw.size(); ++l) {
            for (Eigen::Index r = 0; r < grads.dw[l].rows(); ++r)
              for (Eigen::Index c = 0; c < grads.dw[l].cols(); ++c)
                analytic(at++) = grads.dw[l](r, c);
            for (Eigen::Index r = 0; r < grads.db[l].size(); ++r)
              analytic(at++) = grads.db[l](r);
          }
        }
        MlpEncoder probe = enc;
        Vector fd = finite_diff_grad(
            [&](const Vector& p) {
              probe.set_params_flat(p);
              return chain_value(probe).value;
            },
            enc.params_flat());
        worst = std::max(worst, max_rel_err(analytic, fd));
        (void)rep;
      }
    }
    suite.add(std::string("grad_chain_") + gc.name, worst <= 1e-5,
              {{"max_rel_err", worst}});
  }

  // exact identity reductions (value and gradient within 1e-12)
  {
    RngStream rng = root.child(3000);
    MultiViewBatch none = random_batch(4, 3, 0.5, 0.0, rng);   // P empty
    for (char& c : none.labeled) c = 0;
    MultiViewBatch all = random_batch(4, 3, 0.5, 0.0, rng);
    for (char& c : all.labeled) c = 1;                          // P = I
    MultiViewBatch mixed = random_batch(4, 3, 0.5, 0.6, rng);

    auto close = [](const LossReport& a, const LossReport& b) {
      return std::abs(a.value - b.value) <= 1e-12 &&
             (a.grad - b.grad).lpNorm<Eigen::Infinity>() <= 1e-12;
    };
    suite.add("identity_pucl_empty_equals_sscl",
              close(loss_pucl(none), loss_sscl(none)));
    suite.add("identity_mcl0_equals_sscl",
              close(loss_mcl(mixed, 0.0), loss_sscl(mixed)));
    suite.add("identity_mcl1_equals_sclpu",
              close(loss_mcl(mixed, 1.0), loss_scl_pu(mixed)));
    suite.add("identity_sclpu_allP_equals_pucl",
              close(loss_scl_pu(all), loss_pucl(all)));
  }

  // repulsion-mass comparison: puCL never places more same-class softmax
  // mass than ssCL on fully labeled binary batches
  {
    bool ok = true;
    double worst_gap = 0.0;
    for (int s = 0; s < 10; ++s) {
      RngStream rng = root.child(4000 + s);
      std::vector<char> labeled(6);
      std::vector<int> cls(6);
      for (int i = 0; i < 6; ++i) {
        cls[i] = rng.uniform01() < 0.5 ? 1 : 0;
        labeled[i] = cls[i] == 1;  // every positive is labeled
      }
      Matrix v1 = random_unit_rows(6, 3, rng);
      Matrix v2 = random_unit_rows(6, 3, rng);
      MultiViewBatch batch = make_batch(v1, v2, labeled, 0.5);
      std::vector<int> full(12);
      for (int i = 0; i < 6; ++i) full[i] = full[i + 6] = cls[i];
      batch.full_labels = full;
      GradientBiasMasses m = gradient_bias_compare(batch);
      ok = ok && m.pucl_sameclass_mass <= m.sscl_sameclass_mass + 1e-12;
      worst_gap =
          std::max(worst_gap, m.pucl_sameclass_mass - m.sscl_sameclass_mass);
    }
    suite.add("gradient_bias_pucl_leq_sscl", ok, {{"worst_gap", worst_gap}});
  }
  return suite.finish();
}

SuiteResult verify_bias(std::uint64_t seed, long trials) {
  if (trials <= 0) trials = 100000;
  SuiteBuilder suite{"bias"};
  struct Config {
    double pi_p, gamma, spread, tau;
  };
  const Config configs[] = {
      {0.5, 0.0, 0.0, 1.0},  // antipodal, zero spread: predicted bias = 1
      {0.5, 0.25, 0.3, 1.0},
      {0.4, 0.2, 0.3, 1.0},
      {0.75, 0.5, 0.1, 0.5},
      {0.3, 0.25, 0.4, 1.0},
  };
  int idx = 0;
  for (const Config& c : configs) {
    EmbeddingModel model;
    model.k = 2;
    model.mu_pos = Vector::Zero(2);
    model.mu_pos(0) = 1.0;
    model.mu_neg = -model.mu_pos;
    model.spread = c.spread;
    model.pi_p = c.pi_p;
    model.tau = c.tau;
    BiasReport rep = mc_bias_scl_pu(model, c.gamma, 20, trials,
                                    seed + static_cast<std::uint64_t>(idx));
    double se = std::hypot(rep.stderr_mc, rep.stderr_predicted);
    double dev = std::abs(rep.bias_mc - rep.bias_predicted);
    json details = {{"pi_p", c.pi_p},
                    {"gamma", rep.gamma},
                    {"spread", c.spread},
                    {"tau", c.tau},
                    {"bias_mc", rep.bias_mc},
                    {"bias_predicted", rep.bias_predicted},
                    {"stderr", se},
                    {"sigmas_away", se > 0 ? dev / se : 0.0},
                    {"kappa", rep.kappa},
                    {"partition_bias_mc", rep.partition_bias_mc},
                    {"partition_stderr", rep.partition_stderr}};
    suite.add("theorem1_config_" + std::to_string(idx), dev <= 3.0 * se, details);
    if (idx == 0)
      suite.add("theorem1_degenerate_closed_form",
                std::abs(rep.bias_predicted - 1.0) <= 1e-9,
                {{"bias_predicted", rep.bias_predicted}});
    ++idx;
  }
  return suite.finish();
}

SuiteResult verify_variance(std::uint64_t seed, long trials) {
  if (trials <= 0) trials = 20000;
  SuiteBuilder suite{"variance"};
  EmbeddingModel model;
  model.k = 2;
  model.mu_pos = Vector::Zero(2);
  model.mu_pos(0) = 1.0;
  model.mu_neg = -model.mu_pos;
  model.spread = 0.3;
  model.pi_p = 0.5;
  model.tau = 1.0;
  std::vector<double> gammas{0.0, 0.1, 0.3, 0.5, 1.0};
  std::vector<VarianceGapPoint> points =
      mc_variance_gap(model, gammas, trials, seed);

  suite.add("lemma1_gap_zero_at_gamma0",
            points[0].gap == 0.0 && points[0].stderr_ == 0.0,
            {{"gap", points[0].gap}});
  for (std::size_t i = 0; i < points.size(); ++i) {
    const VarianceGapPoint& p = points[i];
    double se_ss = std::hypot(p.se_sscl, p.se_ideal);
    double se_pu = std::hypot(p.se_pucl, p.se_ideal);
    bool unbiased = std::abs(p.mean_sscl - p.ideal) <= 3.0 * se_ss &&
                    std::abs(p.mean_pucl - p.ideal) <= 3.0 * se_pu;
    suite.add("lemma1_unbiased_gamma_" + std::to_string(p.gamma), unbiased,
              {{"mean_sscl", p.mean_sscl},
               {"mean_pucl", p.mean_pucl},
               {"ideal", p.ideal},
               {"se_sscl", se_ss},
               {"se_pucl", se_pu}});
    if (i > 0)
      suite.add("lemma1_gap_nonneg_gamma_" + std::to_string(p.gamma),
                p.gap >= -2.0 * p.stderr_,
                {{"gap", p.gap}, {"stderr", p.stderr_}});
  }
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    double slack = 2.0 * std::hypot(points[i].stderr_, points[i + 1].stderr_);
    suite.add("lemma1_gap_monotone_" + std::to_string(points[i].gamma) + "_to_" +
                  std::to_string(points[i + 1].gamma),
              points[i + 1].gap >= points[i].gap - slack,
              {{"gap_lo", points[i].gap}, {"gap_hi", points[i + 1].gap},
               {"slack", slack}});
  }
  return suite.finish();
}

SuiteResult verify_centroid_lemma(std::uint64_t seed) {
  SuiteBuilder suite{"centroid_lemma"};
  RngStream root(seed, 60);
  double worst = 0.0;
  bool ok = true;
  for (int n_p = 1; n_p <= 10; ++n_p) {
    for (int set = 0; set < 20; ++set) {
      RngStream rng = root.child(n_p * 100 + set);
      Matrix z(n_p, 3);
      for (int r = 0; r < n_p; ++r)
        for (int c = 0; c < 3; ++c) z(r, c) = rng.normal();
      for (int n_l = 1; n_l <= n_p; ++n_l) {
        auto [lhs, rhs] = exact_centroid_lemma_check(z, n_l);
        double err = std::abs(lhs - rhs);
        worst = std::max(worst, err);
        ok = ok && err <= 1e-9;
      }
    }
  }
  suite.add("centroid_lemma_exact_all_np_nl", ok, {{"worst_abs_err", worst}});
  {
    // all points identical: both sides vanish
    Matrix z = Matrix::Ones(5, 3);
    auto [lhs, rhs] = exact_centroid_lemma_check(z, 2);
    suite.add("centroid_lemma_degenerate_zero",
              std::abs(lhs) <= 1e-12 && std::abs(rhs) <= 1e-12);
  }
  return suite.finish();
}

SuiteResult verify_pupl_bound(std::uint64_t seed, long trials) {
  if (trials <= 0) trials = 1000;
  SuiteBuilder suite{"pupl_bound"};
  RngStream root(seed, 70);
  json instances = json::array();
  bool all_pupl = true, all_km = true, all_paired = true;
  for (int inst = 0; inst < 6; ++inst) {
    RngStream irng = root.child(inst);
    const int n = 8 + inst % 5;  // 8..12
    Matrix z(n, 2);
    std::vector<char> positive(n);
    int n_pos = 0;
    for (int i = 0; i < n; ++i) {
      positive[i] = i < (n + 1) / 2;  // half-ish positives
      n_pos += positive[i] ? 1 : 0;
      double cx = positive[i] ? 1.5 : -1.5;
      z(i, 0) = cx + 0.4 * irng.normal();
      z(i, 1) = 0.4 * irng.normal();
    }
    const int n_lab = std::max(1, static_cast<int>(std::lround(0.4 * n_pos)));
    double phi_star = brute_force_optimal_2means(z).phi_star;

    std::vector<int> pos_idx;
    for (int i = 0; i < n; ++i)
      if (positive[i]) pos_idx.push_back(i);

    double sum_fixed = 0.0, sum_marg = 0.0, sum_km = 0.0;
    std::vector<double> diffs(trials);
    for (long t = 0; t < trials; ++t) {
      RngStream trng = irng.child(100 + t);
      // fixed conditioning: the first n_lab positives stay labeled
      {
        Matrix z_l(n_lab, 2), z_u(n - n_lab, 2);
        int il = 0, iu = 0;
        for (int i = 0; i < n; ++i) {
          bool lab = false;
          for (int j = 0; j < n_lab; ++j) lab |= pos_idx[j] == i;
          if (lab)
            z_l.row(il++) = z.row(i);
          else
            z_u.row(iu++) = z.row(i);
        }
        auto [mp, mn] = pupl_init(z_l, z_u, trng);
        sum_fixed += potential(z, mp, mn);
      }
      // marginalized conditioning: a fresh uniformly random labeled subset
      double pot_marg;
      {
        std::vector<int> shuffled = pos_idx;
        for (int i = static_cast<int>(shuffled.size()) - 1; i > 0; --i) {
          int j = static_cast<int>(trng.below(i + 1));
          std::swap(shuffled[i], shuffled[j]);
        }
        std::vector<char> lab(n, 0);
        for (int j = 0; j < n_lab; ++j) lab[shuffled[j]] = 1;
        Matrix z_l(n_lab, 2), z_u(n - n_lab, 2);
        int il = 0, iu = 0;
        for (int i = 0; i < n; ++i)
          (lab[i] ? z_l.row(il++) : z_u.row(iu++)) = z.row(i);
        auto [mp, mn] = pupl_init(z_l, z_u, trng);
        pot_marg = potential(z, mp, mn);
        sum_marg += pot_marg;
      }
      double pot_km;
      {
        auto [c1, c2] = kmeanspp_init(z, trng);
        pot_km = potential(z, c1, c2);
        sum_km += pot_km;
      }
      diffs[t] = pot_marg - pot_km;
    }
    double mean_fixed = sum_fixed / trials;
    double mean_marg = sum_marg / trials;
    double mean_km = sum_km / trials;
    double mean_diff = 0.0, var_diff = 0.0;
    for (double d : diffs) mean_diff += d;
    mean_diff /= trials;
    for (double d : diffs) var_diff += (d - mean_diff) * (d - mean_diff);
    double se_diff = std::sqrt(var_diff / (trials - 1) / trials);

    bool pupl_ok = mean_fixed <= 16.0 * phi_star && mean_marg <= 16.0 * phi_star;
    bool km_ok = mean_km <= 21.55 * phi_star;
    bool paired_ok = mean_diff <= 2.0 * se_diff;
    all_pupl = all_pupl && pupl_ok;
    all_km = all_km && km_ok;
    all_paired = all_paired && paired_ok;
    instances.push_back({{"n", n},
                         {"n_labeled", n_lab},
                         {"phi_star", phi_star},
                         {"ratio_pupl_fixed", mean_fixed / phi_star},
                         {"ratio_pupl_marginalized", mean_marg / phi_star},
                         {"ratio_kmeanspp", mean_km / phi_star},
                         {"paired_diff", mean_diff},
                         {"paired_se", se_diff}});
  }
  suite.add("theorem2_pupl_16phi", all_pupl, instances);
  suite.add("theorem2_kmeanspp_2155phi", all_km);
  suite.add("theorem2_pupl_leq_kmeanspp_paired", all_paired);
  return suite.finish();
}

SuiteResult verify_upu(std::uint64_t seed, long resamples) {
  if (resamples <= 0) resamples = 500;
  SuiteBuilder suite{"upu"};
  RngStream root(seed, 80);

  GmmSpec spec;
  spec.d = 2;
  spec.mean_pos = Vector::Zero(2);
  spec.mean_pos(0) = 1.0;
  spec.mean_neg = -spec.mean_pos;
  spec.sigma = 1.0;
  spec.n = 600;
  spec.pi_p = 0.4;
  spec.seed = seed + 11;
  SupervisedDataset sup = gen_gmm(spec);
  int n_pos = sup.positive_count();
  double pi_hat = static_cast<double>(n_pos) / spec.n;

  HeadConfig head_cfg;
  head_cfg.epochs = 200;
  LinearHead head = train_ce(sup.features, sup.truth, head_cfg);

  // PN risk of the fixed head, pi_hat-weighted class-conditional means
  double risk_pos = 0.0, risk_neg = 0.0;
  long cnt_pos = 0, cnt_neg = 0;
  for (int i = 0; i < spec.n; ++i) {
    double s = head.score(sup.features.row(i).transpose());
    if (sup.truth[i] == 1) {
      risk_pos += logistic_loss(s, 1);
      ++cnt_pos;
    } else {
      risk_neg += logistic_loss(s, 0);
      ++cnt_neg;
    }
  }
  double pn_risk = pi_hat * risk_pos / cnt_pos +
                   (1.0 - pi_hat) * risk_neg / cnt_neg;

  std::vector<double> upu_risks(resamples);
  for (long r = 0; r < resamples; ++r) {
    PUDataset pu = sample_pu_case_control(sup, 60, 240, seed + 1000 + r);
    Matrix z_p(60, 2), z_u(240, 2);
    int ip = 0, iu = 0;
    for (Eigen::Index i = 0; i < pu.features.rows(); ++i)
      (pu.observed[i] == Observed::kP ? z_p.row(ip++) : z_u.row(iu++)) =
          pu.features.row(i);
    upu_risks[r] = risk_upu(head, z_p, z_u, pi_hat).combined;
  }
  double mean_upu = std::accumulate(upu_risks.begin(), upu_risks.end(), 0.0) /
                    resamples;
  double var_upu = 0.0;
  for (double v : upu_risks) var_upu += (v - mean_upu) * (v - mean_upu);
  double se_upu = std::sqrt(var_upu / (resamples - 1) / resamples);
  suite.add("upu_unbiased_vs_pn_risk",
            std::abs(mean_upu - pn_risk) <= 3.0 * se_upu,
            {{"mean_upu", mean_upu},
             {"pn_risk", pn_risk},
             {"stderr", se_upu},
             {"resamples", resamples}});

  // nnPU identities on random heads over the same embedding sets
  {
    Matrix z_p(n_pos, 2), z_u(spec.n, 2);
    int ip = 0;
    for (int i = 0; i < spec.n; ++i) {
      z_u.row(i) = sup.features.row(i);
      if (sup.truth[i] == 1) z_p.row(ip++) = sup.features.row(i);
    }
    bool eq_ok = true, floor_ok = true;
    for (int t = 0; t < 10; ++t) {
      RngStream rng = root.child(200 + t);
      LinearHead h;
      h.w = Vector(2);
      h.w << rng.normal(), rng.normal();
      h.b = 0.5 * rng.normal();
      RiskBreakdown u = risk_upu(h, z_p, z_u, pi_hat);
      RiskBreakdown nn = risk_nnpu(h, z_p, z_u, pi_hat);
      if (!nn.clipped) eq_ok = eq_ok && nn.combined == u.combined;
      floor_ok = floor_ok && nn.combined >= pi_hat * nn.r_p_plus - 1e-15;
    }
    suite.add("nnpu_equals_upu_when_unclipped", eq_ok);
    suite.add("nnpu_floor_pi_rp_plus", floor_ok);

    // adversarial construction that must clip
    Matrix zp2(4, 2), zu2(4, 2);
    zp2 << 10, 0, 10, 0.5, 9, 0, 11, 0;
    zu2 << -10, 0, -9, 0, -11, 0, -10, 0.5;
    LinearHead h;
    h.w = Vector(2);
    h.w << 1.0, 0.0;
    h.b = 0.0;
    RiskBreakdown nn = risk_nnpu(h, zp2, zu2, 0.5);
    suite.add("nnpu_clipped_construction",
              nn.clipped && nn.combined == 0.5 * nn.r_p_plus,
              {{"r_u_minus", nn.r_u_minus}, {"r_p_minus", nn.r_p_minus}});
  }

  // label-noise view: empirical flip rate of treat-U-as-negative
  {
    bool ok = true;
    json rows = json::array();
    int combo = 0;
    for (auto [pi, gamma] : std::vector<std::pair<double, double>>{
             {0.4, 0.3}, {0.5, 0.5}}) {
      GmmSpec big = spec;
      big.n = 260000;
      big.pi_p = pi;
      big.seed = seed + 77 + combo;
      SupervisedDataset parent = gen_gmm(big);
      int n_u = 100000;
      int n_p = static_cast<int>(std::lround(gamma * n_u));
      PUDataset pu = sample_pu_case_control(parent, n_p, n_u, seed + 99 + combo);
      long pos_total = 0, pos_unlabeled = 0;
      for (std::size_t i = 0; i < pu.truth.size(); ++i) {
        if (pu.truth[i] == 1) {
          ++pos_total;
          if (pu.observed[i] == Observed::kU) ++pos_unlabeled;
        }
      }
      double empirical = static_cast<double>(pos_unlabeled) / pos_total;
      double predicted = noise_rates(pi, gamma).first;
      ok = ok && std::abs(empirical - predicted) <= 0.02;
      rows.push_back({{"pi_p", pi},
                      {"gamma", gamma},
                      {"empirical", empirical},
                      {"predicted", predicted}});
      ++combo;
    }
    suite.add("noise_rate_flip_fraction", ok, rows);
  }
  {
    bool ok = true;
    for (double pi : {0.1, 0.25, 0.5, 0.75, 0.8, 0.9})
      for (double gamma : {0.0, 0.1, 0.2, 0.5, 0.6, 1.0})
        ok = ok && breakdown_violated(pi, gamma) == (gamma <= 2.0 * pi - 1.0);
    suite.add("breakdown_truth_table", ok);
  }
  return suite.finish();
}

SuiteResult verify_generalization(std::uint64_t seed, int instances) {
  if (instances <= 0) instances = 50;
  SuiteBuilder suite{"generalization"};
  RngStream root(seed, 90);

  int condition_true = 0, lemma3_true = 0;
  bool no_violation = true, lemma2_all = true, implication_ok = true;
  json rows = json::array();
  for (int inst = 0; inst < instances; ++inst) {
    RngStream rng = root.child(inst);
    const double sep = 1.5 + 1.5 * rng.uniform01();
    const double cls_spread = 0.05 + 0.2 * rng.uniform01();
    const double aug_noise = 0.01 + 0.04 * rng.uniform01();
    const int per_class = 5 + static_cast<int>(rng.below(4));
    const int m_augs = 3;

    AugmentedDataset ds;
    ds.pi_p = 0.5;
    for (int cls : {1, 0}) {
      for (int i = 0; i < per_class; ++i) {
        AugmentedSample s;
        s.cls = cls;
        s.base = Vector(2);
        s.base << (cls == 1 ? sep : -sep) + cls_spread * rng.normal(),
            cls_spread * rng.normal();
        s.augs.resize(m_augs, 2);
        for (int a = 0; a < m_augs; ++a)
          for (int c = 0; c < 2; ++c)
            s.augs(a, c) = s.base(c) + aug_noise * rng.normal();
        ds.samples.push_back(std::move(s));
      }
    }

    MlpEncoder enc = [&] {
      int kind = inst % 3;
      if (kind == 0) {
        // rotation + scale, then normalize: a well-clustered encoder
        MlpEncoder e({2, 2}, Activation::kIdentity, true);
        double theta = 2.0 * 3.141592653589793 * rng.uniform01();
        double s = 0.5 + rng.uniform01();
        e.weight(0) << s * std::cos(theta), -s * std::sin(theta),
            s * std::sin(theta), s * std::cos(theta);
        return e;
      }
      if (kind == 1) {
        RngStream erng = rng.child(7);
        return MlpEncoder::random_init({2, 8, 2}, Activation::kTanh, true, erng,
                                       1.2);
      }
      MlpEncoder e({2, 2}, Activation::kIdentity, true);
      e.weight(0) << 1.0, 0.9, 0.9, 1.0;  // nearly rank-deficient
      return e;
    }();

    Matrix base(ds.samples.size(), 2);
    std::vector<char> labeled(ds.samples.size(), 0);
    int labeled_count = 0;
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
      base.row(i) = ds.samples[i].base.transpose();
      if (ds.samples[i].cls == 1 && labeled_count < (per_class * 2) / 5) {
        labeled[i] = 1;
        ++labeled_count;
      }
    }
    Matrix z = enc.encode(base);
    PuplResult pl = pupl(z, labeled, seed + inst);

    RngStream lrng = rng.child(8);
    double lips = estimate_lipschitz(enc, 400, sep + 1.0, lrng);

    const double epsilon = 0.5;
    BoundReport rep = check_theorem3(enc, ds, pl.clustering, epsilon, lips);
    no_violation = no_violation && !rep.violation;
    if (rep.condition_holds) ++condition_true;

    Lemma2Report l2 = lemma2_check(enc, ds, epsilon, lips, 1.0, m_augs);
    lemma2_all = lemma2_all && l2.holds;

    SplitReport split = split_for_dataset(enc, ds);
    Lemma3Result l3 =
        lemma3_condition(split.l_unif, rep.sigma, rep.delta, epsilon, rep.r_eps,
                         ds.pi_p, lips, rep.eta, rep.delta_mu, rep.zeta_mu);
    if (l3.holds) {
      ++lemma3_true;
      implication_ok = implication_ok && rep.condition_holds;
    }
    rows.push_back({{"instance", inst},
                    {"sigma", rep.sigma},
                    {"delta", rep.delta},
                    {"r_eps", rep.r_eps},
                    {"eta", rep.eta},
                    {"condition", rep.condition_holds},
                    {"err", rep.err},
                    {"bound", rep.bound},
                    {"lemma2_lhs", l2.lhs},
                    {"lemma2_rhs", l2.rhs},
                    {"lemma3_lhs", l3.lhs},
                    {"lemma3_rhs", l3.rhs}});
  }
  suite.add("theorem3_no_violations", no_violation, rows);
  suite.add("theorem3_condition_exercised", condition_true >= 1,
            {{"condition_true_count", condition_true}});
  suite.add("lemma2_holds_every_instance", lemma2_all);
  suite.add("lemma3_implication", implication_ok,
            {{"lemma3_true_count", lemma3_true}});

  // nearest-centroid rule vs affine rule, exact agreement
  {
    RngStream rng = root.child(5000);
    bool ok = true;
    for (int t = 0; t < 1000; ++t) {
      int k = 2 + static_cast<int>(rng.below(4));
      Vector mu_p(k), mu_n(k), z(k);
      for (int c = 0; c < k; ++c) {
        mu_p(c) = rng.normal();
        mu_n(c) = rng.normal();
        z(c) = rng.normal();
      }
      Matrix zm(1, k);
      zm.row(0) = z.transpose();
      int by_dist = nearest_centroid_classify(zm, mu_p, mu_n)[0];
      double score_p = mu_p.dot(z) - 0.5 * mu_p.squaredNorm();
      double score_n = mu_n.dot(z) - 0.5 * mu_n.squaredNorm();
      int by_affine = score_p >= score_n ? 1 : 0;
      ok = ok && by_dist == by_affine;
    }
    suite.add("nearest_centroid_equals_affine_rule", ok);
  }
  return suite.finish();
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed, long trials) {
  if (name == "bias") return verify_bias(seed, trials);
  if (name == "variance") return verify_variance(seed, trials);
  if (name == "centroid_lemma") return verify_centroid_lemma(seed);
  if (name == "pupl_bound") return verify_pupl_bound(seed, trials);
  if (name == "upu") return verify_upu(seed, trials);
  if (name == "generalization")
    return verify_generalization(seed, static_cast<int>(trials > 0 ? trials : 50));
  if (name == "gradients") return verify_gradients(seed);
  fail(ErrorKind::kInvalidArgs, "unknown verify suite: " + name);
}

}  // namespace pucl
