#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pucl/contrastive.hpp"
#include "pucl/matrix.hpp"
#include "pucl/pu_data.hpp"
#include "pucl/rng.hpp"

namespace pucl {

enum class Activation { kRelu, kTanh, kIdentity };
const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// Small MLP g: R^d -> R^k with optional final sphere normalization.
// Hidden layers use the configured activation; the last layer is linear.
class MlpEncoder {
 public:
  MlpEncoder() = default;
  MlpEncoder(std::vector<int> widths, Activation act, bool normalize_output);

  static MlpEncoder random_init(std::vector<int> widths, Activation act,
                                bool normalize_output, RngStream& rng,
                                double weight_scale = 1.0);

  Matrix encode(const Matrix& x) const;

  struct Gradients {
    std::vector<Matrix> dw;
    std::vector<Vector> db;
    double squared_norm() const;
  };

  // Gradients of the scalar loss whose embedding gradient is dl_dz,
  // including the normalization layer's Jacobian (I - yy^T)/|z|.
  Gradients backprop(const Matrix& x, const Matrix& dl_dz) const;

  void apply_update(const Gradients& g, double lr);

  // Flattened parameter round trip (finite-difference oracle hooks).
  Vector params_flat() const;
  void set_params_flat(const Vector& p);
  long param_count() const;

  const std::vector<int>& widths() const { return widths_; }
  Activation activation() const { return act_; }
  bool normalize_output() const { return normalize_output_; }
  int input_dim() const { return widths_.front(); }
  int output_dim() const { return widths_.back(); }

  Matrix& weight(int layer) { return w_[layer]; }
  Vector& bias(int layer) { return b_[layer]; }

  void save_json(const std::filesystem::path& path) const;
  static MlpEncoder load_json(const std::filesystem::path& path);

 private:
  std::vector<int> widths_;
  std::vector<Matrix> w_;  // layer l: widths[l+1] x widths[l]
  std::vector<Vector> b_;
  Activation act_ = Activation::kTanh;
  bool normalize_output_ = true;
};

struct TrainHyper {
  double lr = 0.05;
  int epochs = 300;
  int batch_size = 64;
  double tau = 0.5;
  double lambda = 0.1;  // mcl/dcl mixing weight
  double aug_sigma = 0.1;
  std::uint64_t seed = 0;
};

struct TrainHistory {
  std::vector<double> loss;       // per-epoch mean batch loss
  std::vector<double> grad_norm;  // per-epoch mean parameter-gradient norm
  long steps = 0;
};

// Mini-batch gradient descent on the chosen contrastive loss. Views are the
// sample plus isotropic Gaussian noise (std aug_sigma), drawn twice.
TrainHistory train_encoder(MlpEncoder& enc, const PuTrainView& data,
                           LossKind kind, const TrainHyper& hyper);

// Max ratio |g(x)-g(x')| / |x-x'| over sampled pairs; a lower bound on the
// true Lipschitz constant.
double estimate_lipschitz(const MlpEncoder& enc, int probe_pairs, double scale,
                          RngStream& rng);

}  // namespace pucl
