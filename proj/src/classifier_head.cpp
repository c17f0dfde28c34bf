#include "pucl/classifier_head.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "pucl/error.hpp"

namespace pucl {

using nlohmann::json;

Vector LinearHead::scores(const Matrix& z) const {
  return (z * w).array() + b;
}

void LinearHead::save_json(const std::filesystem::path& path) const {
  json j;
  std::vector<std::string> ws(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) ws[i] = format_double(w(i));
  j["w"] = ws;
  j["b"] = format_double(b);
  std::ofstream out(path);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path.string());
  out << j.dump(2) << '\n';
}

LinearHead LinearHead::load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  json j = json::parse(in);
  auto ws = j.at("w").get<std::vector<std::string>>();
  LinearHead head;
  head.w.resize(ws.size());
  for (std::size_t i = 0; i < ws.size(); ++i) head.w(i) = std::stod(ws[i]);
  head.b = std::stod(j.at("b").get<std::string>());
  return head;
}

double logistic_loss(double score, int label) {
  double s = label == 1 ? score : -score;
  // log(1 + exp(-s)) without overflow
  return s >= 0.0 ? std::log1p(std::exp(-s)) : -s + std::log1p(std::exp(s));
}

namespace {

double sigmoid(double s) {
  return s >= 0.0 ? 1.0 / (1.0 + std::exp(-s))
                  : std::exp(s) / (1.0 + std::exp(s));
}

// mean logistic loss and its gradient over rows of z with a fixed label
struct RiskGrad {
  double value = 0.0;
  Vector dw;
  double db = 0.0;
};

RiskGrad mean_logistic(const LinearHead& head, const Matrix& z, int label) {
  RiskGrad out;
  out.dw = Vector::Zero(z.cols());
  const double n = static_cast<double>(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    double s = head.score(z.row(i).transpose());
    out.value += logistic_loss(s, label);
    double residual = sigmoid(s) - (label == 1 ? 1.0 : 0.0);
    out.dw += residual * z.row(i).transpose();
    out.db += residual;
  }
  out.value /= n;
  out.dw /= n;
  out.db /= n;
  return out;
}

}  // namespace

LinearHead train_ce(const Matrix& z, const std::vector<int>& labels,
                    const HeadConfig& cfg, std::vector<double>* loss_trace) {
  if (static_cast<Eigen::Index>(labels.size()) != z.rows())
    fail(ErrorKind::kLengthMismatch, "train_ce: labels size mismatch");
  long pos = std::count(labels.begin(), labels.end(), 1);
  if (pos == 0 || pos == static_cast<long>(labels.size()))
    fail(ErrorKind::kSingleClass, "train_ce: both classes must be present");
  LinearHead head;
  head.w = Vector::Zero(z.cols());
  const double n = static_cast<double>(z.rows());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Vector dw = Vector::Zero(z.cols());
    double db = 0.0;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      double s = head.score(z.row(i).transpose());
      loss += logistic_loss(s, labels[i]);
      double residual = sigmoid(s) - (labels[i] == 1 ? 1.0 : 0.0);
      dw += residual * z.row(i).transpose();
      db += residual;
    }
    loss = loss / n + 0.5 * cfg.l2 * head.w.squaredNorm();
    if (loss_trace) loss_trace->push_back(loss);
    head.w -= cfg.lr * (dw / n + cfg.l2 * head.w);
    head.b -= cfg.lr * (db / n);
  }
  return head;
}

RiskBreakdown risk_upu(const LinearHead& head, const Matrix& z_p,
                       const Matrix& z_u, double pi_p) {
  if (z_p.rows() == 0 || z_u.rows() == 0)
    fail(ErrorKind::kEmptySet, "risk_upu: empty positive or unlabeled set");
  if (pi_p <= 0.0 || pi_p >= 1.0)
    fail(ErrorKind::kInvalidArgs, "risk_upu: pi_p in (0,1)");
  RiskBreakdown r;
  r.r_p_plus = mean_logistic(head, z_p, 1).value;
  r.r_p_minus = mean_logistic(head, z_p, 0).value;
  r.r_u_minus = mean_logistic(head, z_u, 0).value;
  r.combined = pi_p * r.r_p_plus + (r.r_u_minus - pi_p * r.r_p_minus);
  r.clipped = false;
  return r;
}

RiskBreakdown risk_nnpu(const LinearHead& head, const Matrix& z_p,
                        const Matrix& z_u, double pi_p) {
  RiskBreakdown r = risk_upu(head, z_p, z_u, pi_p);
  double negative_part = r.r_u_minus - pi_p * r.r_p_minus;
  r.clipped = negative_part < 0.0;
  r.combined = pi_p * r.r_p_plus + std::max(0.0, negative_part);
  return r;
}

LinearHead train_nnpu(const Matrix& z_p, const Matrix& z_u, double pi_p,
                      const HeadConfig& cfg, std::vector<double>* risk_trace) {
  if (z_p.rows() == 0 || z_u.rows() == 0)
    fail(ErrorKind::kEmptySet, "train_nnpu: empty positive or unlabeled set");
  if (pi_p <= 0.0 || pi_p >= 1.0)
    fail(ErrorKind::kInvalidArgs, "train_nnpu: pi_p in (0,1)");
  LinearHead head;
  head.w = Vector::Zero(z_p.cols());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    RiskGrad p_plus = mean_logistic(head, z_p, 1);
    RiskGrad p_minus = mean_logistic(head, z_p, 0);
    RiskGrad u_minus = mean_logistic(head, z_u, 0);
    double negative_part = u_minus.value - pi_p * p_minus.value;
    double risk = pi_p * p_plus.value + std::max(0.0, negative_part);
    if (risk_trace) risk_trace->push_back(risk);
    Vector dw = pi_p * p_plus.dw;
    double db = pi_p * p_plus.db;
    if (negative_part > 0.0) {
      dw += u_minus.dw - pi_p * p_minus.dw;
      db += u_minus.db - pi_p * p_minus.db;
    }
    dw += cfg.l2 * head.w;
    head.w -= cfg.lr * dw;
    head.b -= cfg.lr * db;
  }
  return head;
}

std::vector<int> nearest_centroid_classify(const Matrix& z, const Vector& mu_p,
                                           const Vector& mu_n) {
  if (z.cols() != mu_p.size() || z.cols() != mu_n.size())
    fail(ErrorKind::kDimMismatch, "nearest_centroid_classify: dim mismatch");
  std::vector<int> labels(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    double dp = (z.row(i).transpose() - mu_p).squaredNorm();
    double dn = (z.row(i).transpose() - mu_n).squaredNorm();
    labels[i] = dp <= dn ? 1 : 0;
  }
  return labels;
}

Metrics evaluate(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size())
    fail(ErrorKind::kLengthMismatch, "evaluate: length mismatch");
  if (pred.empty()) fail(ErrorKind::kLengthMismatch, "evaluate: empty input");
  long tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == 1 && truth[i] == 1) ++tp;
    else if (pred[i] == 1) ++fp;
    else if (truth[i] == 1) ++fn;
    else ++tn;
  }
  Metrics m;
  m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(pred.size());
  m.precision = (tp + fp) ? static_cast<double>(tp) / (tp + fp) : 0.0;
  m.recall = (tp + fn) ? static_cast<double>(tp) / (tp + fn) : 0.0;
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

}  // namespace pucl
