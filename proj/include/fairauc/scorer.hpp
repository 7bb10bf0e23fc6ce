#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>

namespace fairauc {

// Three-layer perceptron d -> h1 -> h2 -> 1, tanh hidden units, linear output.
// Scores are ranking values, so no output squashing.
struct MlpParams {
  Eigen::MatrixXd w1;  // h1 x d
  Eigen::VectorXd b1;  // h1
  Eigen::MatrixXd w2;  // h2 x h1
  Eigen::VectorXd b2;  // h2
  Eigen::MatrixXd w3;  // 1 x h2
  Eigen::VectorXd b3;  // 1

  int input_dim() const { return static_cast<int>(w1.cols()); }
  int hidden1() const { return static_cast<int>(w1.rows()); }
  int hidden2() const { return static_cast<int>(w2.rows()); }
  long parameter_count() const;
};

struct SamConfig {
  double nu = 0.0;  // perturbation radius, >= 0
};

// Glorot-uniform init, deterministic per seed.
MlpParams make_mlp(int input_dim, int h1, int h2, std::uint64_t seed);
MlpParams zeros_like(const MlpParams& p);

Eigen::VectorXd forward(const MlpParams& p, const Eigen::MatrixXd& features);

// Scalar loss assembled from scores: returns the value and d(loss)/d(scores).
struct LossGrad {
  double value = 0.0;
  Eigen::VectorXd dscores;
};
using LossAssembly = std::function<LossGrad(const Eigen::VectorXd& scores)>;

struct GradResult {
  double loss = 0.0;
  MlpParams grad;
};

// Reverse-mode gradient of loss(forward(p, features)) w.r.t. every parameter.
GradResult grad(const MlpParams& p, const Eigen::MatrixXd& features,
                const LossAssembly& loss);

// theta + nu * g / ||g||_2 over the flattened parameters; identity when g = 0.
MlpParams sam_perturb(const MlpParams& p, const MlpParams& gradient, const SamConfig& sam);

MlpParams sgd_step(const MlpParams& p, const MlpParams& gradient, double eta);

// Lossless flat view used for norms, perturbation and checkpoints.
// Order: w1 row-major, b1, w2 row-major, b2, w3, b3.
Eigen::VectorXd flatten(const MlpParams& p);
MlpParams unflatten(const Eigen::VectorXd& flat, int input_dim, int h1, int h2);

// Checkpoint layout (little-endian): uint32 d, h1, h2; uint64 count;
// count IEEE-754 doubles in flatten() order.
void save_checkpoint(const MlpParams& p, const std::string& path);
MlpParams load_checkpoint(const std::string& path);

}  // namespace fairauc
