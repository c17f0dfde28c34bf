#include "pucl/encoder.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "pucl/error.hpp"

namespace pucl {

using nlohmann::json;

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
    case Activation::kIdentity: return "identity";
  }
  return "?";
}

Activation activation_from_name(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity") return Activation::kIdentity;
  fail(ErrorKind::kInvalidArgs, "unknown activation: " + name);
}

namespace {

double act_fwd(Activation a, double v) {
  switch (a) {
    case Activation::kRelu: return v > 0.0 ? v : 0.0;
    case Activation::kTanh: return std::tanh(v);
    case Activation::kIdentity: return v;
  }
  return v;
}

// derivative expressed through the pre-activation value
double act_bwd(Activation a, double pre) {
  switch (a) {
    case Activation::kRelu: return pre > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh: {
      double t = std::tanh(pre);
      return 1.0 - t * t;
    }
    case Activation::kIdentity: return 1.0;
  }
  return 1.0;
}

}  // namespace

MlpEncoder::MlpEncoder(std::vector<int> widths, Activation act,
                       bool normalize_output)
    : widths_(std::move(widths)), act_(act), normalize_output_(normalize_output) {
  if (widths_.size() < 2)
    fail(ErrorKind::kInvalidArgs, "MlpEncoder: need at least input and output widths");
  for (int w : widths_)
    if (w < 1) fail(ErrorKind::kInvalidArgs, "MlpEncoder: widths must be >= 1");
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    w_.push_back(Matrix::Zero(widths_[l + 1], widths_[l]));
    b_.push_back(Vector::Zero(widths_[l + 1]));
  }
}

MlpEncoder MlpEncoder::random_init(std::vector<int> widths, Activation act,
                                   bool normalize_output, RngStream& rng,
                                   double weight_scale) {
  MlpEncoder enc(std::move(widths), act, normalize_output);
  for (std::size_t l = 0; l < enc.w_.size(); ++l) {
    double scale =
        weight_scale / std::sqrt(static_cast<double>(enc.widths_[l]));
    for (Eigen::Index r = 0; r < enc.w_[l].rows(); ++r)
      for (Eigen::Index c = 0; c < enc.w_[l].cols(); ++c)
        enc.w_[l](r, c) = scale * rng.normal();
  }
  return enc;
}

Matrix MlpEncoder::encode(const Matrix& x) const {
  if (x.cols() != widths_.front())
    fail(ErrorKind::kDimMismatch, "encode: input width mismatch");
  Matrix a = x;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    Matrix pre = a * w_[l].transpose();
    pre.rowwise() += b_[l].transpose();
    if (l + 1 < w_.size())
      pre = pre.unaryExpr([&](double v) { return act_fwd(act_, v); });
    a = std::move(pre);
  }
  if (normalize_output_) {
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      double norm = a.row(r).norm();
      if (norm <= 1e-12)
        fail(ErrorKind::kZeroRow, "encode: pre-normalization output row is zero");
      a.row(r) /= norm;
    }
  }
  return a;
}

double MlpEncoder::Gradients::squared_norm() const {
  double acc = 0.0;
  for (const Matrix& m : dw) acc += m.squaredNorm();
  for (const Vector& v : db) acc += v.squaredNorm();
  return acc;
}

MlpEncoder::Gradients MlpEncoder::backprop(const Matrix& x,
                                           const Matrix& dl_dz) const {
  if (x.cols() != widths_.front())
    fail(ErrorKind::kDimMismatch, "backprop: input width mismatch");
  if (dl_dz.rows() != x.rows() || dl_dz.cols() != widths_.back())
    fail(ErrorKind::kDimMismatch, "backprop: dl_dz shape mismatch");

  const std::size_t layers = w_.size();
  std::vector<Matrix> activations(layers + 1);  // post-activation inputs
  std::vector<Matrix> pres(layers);             // pre-activation outputs
  activations[0] = x;
  for (std::size_t l = 0; l < layers; ++l) {
    Matrix pre = activations[l] * w_[l].transpose();
    pre.rowwise() += b_[l].transpose();
    pres[l] = pre;
    if (l + 1 < layers)
      pre = pre.unaryExpr([&](double v) { return act_fwd(act_, v); });
    activations[l + 1] = std::move(pre);
  }

  Matrix delta = dl_dz;  // gradient w.r.t. current layer output
  if (normalize_output_) {
    const Matrix& z = activations[layers];  // pre-normalization output
    Matrix adjusted(delta.rows(), delta.cols());
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      double norm = z.row(r).norm();
      if (norm <= 1e-12)
        fail(ErrorKind::kZeroRow, "backprop: pre-normalization output row is zero");
      Vector y = z.row(r).transpose() / norm;
      Vector g = delta.row(r).transpose();
      adjusted.row(r) = ((g - y * y.dot(g)) / norm).transpose();
    }
    delta = std::move(adjusted);
  }

  Gradients grads;
  grads.dw.resize(layers);
  grads.db.resize(layers);
  for (std::size_t l = layers; l-- > 0;) {
    if (l + 1 < layers) {
      // delta currently holds dL/d(post-activation); fold in act'
      delta = delta.cwiseProduct(
          pres[l].unaryExpr([&](double v) { return act_bwd(act_, v); }));
    }
    grads.dw[l] = delta.transpose() * activations[l];
    grads.db[l] = delta.colwise().sum().transpose();
    if (l > 0) delta = delta * w_[l];
  }
  return grads;
}

void MlpEncoder::apply_update(const Gradients& g, double lr) {
  for (std::size_t l = 0; l < w_.size(); ++l) {
    w_[l] -= lr * g.dw[l];
    b_[l] -= lr * g.db[l];
  }
}

long MlpEncoder::param_count() const {
  long n = 0;
  for (std::size_t l = 0; l < w_.size(); ++l)
    n += w_[l].size() + b_[l].size();
  return n;
}

Vector MlpEncoder::params_flat() const {
  Vector p(param_count());
  long at = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    for (Eigen::Index r = 0; r < w_[l].rows(); ++r)
      for (Eigen::Index c = 0; c < w_[l].cols(); ++c) p(at++) = w_[l](r, c);
    for (Eigen::Index r = 0; r < b_[l].size(); ++r) p(at++) = b_[l](r);
  }
  return p;
}

void MlpEncoder::set_params_flat(const Vector& p) {
  if (p.size() != param_count())
    fail(ErrorKind::kDimMismatch, "set_params_flat: size mismatch");
  long at = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    for (Eigen::Index r = 0; r < w_[l].rows(); ++r)
      for (Eigen::Index c = 0; c < w_[l].cols(); ++c) w_[l](r, c) = p(at++);
    for (Eigen::Index r = 0; r < b_[l].size(); ++r) b_[l](r) = p(at++);
  }
}

void MlpEncoder::save_json(const std::filesystem::path& path) const {
  json j;
  j["widths"] = widths_;
  j["activation"] = activation_name(act_);
  j["normalize_output"] = normalize_output_;
  Vector p = params_flat();
  std::vector<std::string> params(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) params[i] = format_double(p(i));
  j["params"] = params;
  std::ofstream out(path);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path.string());
  out << j.dump(2) << '\n';
}

MlpEncoder MlpEncoder::load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  json j = json::parse(in);
  MlpEncoder enc(j.at("widths").get<std::vector<int>>(),
                 activation_from_name(j.at("activation").get<std::string>()),
                 j.at("normalize_output").get<bool>());
  auto params = j.at("params").get<std::vector<std::string>>();
  Vector p(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) p(i) = std::stod(params[i]);
  enc.set_params_flat(p);
  return enc;
}

TrainHistory train_encoder(MlpEncoder& enc, const PuTrainView& data,
                           LossKind kind, const TrainHyper& hyper) {
  if (hyper.batch_size < 2 || hyper.lr <= 0.0 || hyper.epochs < 0 ||
      hyper.tau <= 0.0 || hyper.aug_sigma < 0.0)
    fail(ErrorKind::kInvalidHyper, "train_encoder: invalid hyperparameters");
  const int n = static_cast<int>(data.features.rows());
  if (n < 2) fail(ErrorKind::kInvalidHyper, "train_encoder: need >= 2 samples");
  const int d = static_cast<int>(data.features.cols());

  TrainHistory history;
  RngStream root(hyper.seed, 100);
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    RngStream erng = root.child(static_cast<std::uint64_t>(epoch));
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      int j = static_cast<int>(erng.below(static_cast<std::uint64_t>(i + 1)));
      std::swap(order[i], order[j]);
    }
    double epoch_loss = 0.0;
    double epoch_gnorm = 0.0;
    int batches = 0;
    for (int start = 0; start < n; start += hyper.batch_size) {
      int b = std::min(hyper.batch_size, n - start);
      if (b < 2) break;  // a singleton tail cannot form a contrastive batch
      Matrix v1(b, d), v2(b, d);
      std::vector<char> labeled(b);
      for (int i = 0; i < b; ++i) {
        int src = order[start + i];
        labeled[i] = data.observed[src] == Observed::kP;
        for (int c = 0; c < d; ++c) {
          double base = data.features(src, c);
          v1(i, c) = base + hyper.aug_sigma * erng.normal();
          v2(i, c) = base + hyper.aug_sigma * erng.normal();
        }
      }
      Matrix inputs(2 * b, d);
      inputs.topRows(b) = v1;
      inputs.bottomRows(b) = v2;
      Matrix z = enc.encode(inputs);
      MultiViewBatch batch = make_batch(z.topRows(b), z.bottomRows(b), labeled,
                                        hyper.tau);
      LossReport rep = loss_by_kind(batch, kind, hyper.lambda);
      MlpEncoder::Gradients grads = enc.backprop(inputs, rep.grad);
      enc.apply_update(grads, hyper.lr);
      epoch_loss += rep.value;
      epoch_gnorm += std::sqrt(grads.squared_norm());
      ++batches;
      ++history.steps;
    }
    history.loss.push_back(batches ? epoch_loss / batches : 0.0);
    history.grad_norm.push_back(batches ? epoch_gnorm / batches : 0.0);
  }
  return history;
}

double estimate_lipschitz(const MlpEncoder& enc, int probe_pairs, double scale,
                          RngStream& rng) {
  if (probe_pairs < 1)
    fail(ErrorKind::kInvalidArgs, "estimate_lipschitz: probe_pairs >= 1");
  const int d = enc.input_dim();
  double best = 0.0;
  for (int p = 0; p < probe_pairs; ++p) {
    Matrix pair(2, d);
    for (int c = 0; c < d; ++c) pair(0, c) = scale * rng.normal();
    // alternate far pairs with local perturbations; the local ones probe
    // the slope where it is usually steepest
    double step = (p % 2 == 0) ? scale : scale * 1e-3;
    for (int c = 0; c < d; ++c) pair(1, c) = pair(0, c) + step * rng.normal();
    double dx = (pair.row(0) - pair.row(1)).norm();
    if (dx <= 1e-12) continue;
    Matrix z = enc.encode(pair);
    best = std::max(best, (z.row(0) - z.row(1)).norm() / dx);
  }
  return best;
}

}  // namespace pucl
