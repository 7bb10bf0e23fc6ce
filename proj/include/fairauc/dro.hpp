#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "fairauc/dataset.hpp"

namespace fairauc {

// Weight matrix over (batch positive, batch negative) pairs. Rows follow
// Batch::pos_indices, columns Batch::neg_indices.
struct PairDistribution {
  Eigen::MatrixXd weights;
  int group_pos = 0;         // z of the positives this distribution targets
  int group_neg = 0;         // z' of the negatives
  bool is_reference = false; // true for the empirical p-hat
};

// Per-group-pair TV radius upper bounds; NaN marks an undefined entry.
struct GammaMatrix {
  Eigen::MatrixXd values;  // m x m
  int num_groups = 0;

  static GammaMatrix constant(int m, double gamma);
  bool defined(int z, int zp) const;
  double at(int z, int zp) const { return values(z - 1, zp - 1); }
};

// One row of a similarity file: cosine similarities of a sample against the
// positive and negative group prompts. Ties count as noisy.
struct GammaRecord {
  long id = 0;
  int label = 0;   // +1 / -1
  int group = 0;   // noisy group 1..m
  double sim_pos = 0.0;
  double sim_neg = 0.0;
  bool clean() const { return sim_pos > sim_neg; }
};

// Uniform mass on pairs (positive in group z, negative in group z').
PairDistribution empirical_pair_dist(const Batch& batch, int z, int zp);

// Euclidean projection onto the probability simplex (sort-based).
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

// Euclidean projection onto {q : ||q - center||_1 <= radius} (soft threshold).
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, const Eigen::VectorXd& center,
                                double radius);

// Nearest point of {q >= 0, sum q = 1, ||q - p_hat||_1 <= 2*gamma} to p_tilde.
// Dykstra alternation between the simplex and the L1 ball, iteration cap 500,
// tolerance 1e-8; a final shrink toward p_hat guarantees feasibility.
Eigen::VectorXd project_tv_ball(const Eigen::VectorXd& p_tilde, const Eigen::VectorXd& p_hat,
                                double gamma);
PairDistribution project_tv_ball(const PairDistribution& p_tilde,
                                 const PairDistribution& p_hat, double gamma);

// d(g-bar)/d(p-tilde) is the surrogate pair matrix itself; scaled by lambda.
Eigen::MatrixXd ascent_grad_pair_dist(const Eigen::MatrixXd& pair_matrix, double lambda);

// Exact maximizer of <q, values> over the TV ball around p_hat: moves up to
// gamma mass from the lowest-value support onto the single best coordinate.
struct TvMaxResult {
  double value = 0.0;
  Eigen::VectorXd maximizer;
};
TvMaxResult greedy_tv_max(const Eigen::VectorXd& p_hat, const Eigen::VectorXd& values,
                          double gamma);
TvMaxResult greedy_tv_max(const PairDistribution& p_hat, const Eigen::MatrixXd& values,
                          double gamma);

// Discrete total variation distance, half the L1 distance.
double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q);
double tv_distance(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q);

// gamma_{z,z'} = 1 - (clean positive fraction in z) * (clean negative
// fraction in z'); NaN where a side has no samples.
GammaMatrix estimate_gamma(const std::vector<GammaRecord>& records, int m);

// Columns: id,label,group,sim_pos,sim_neg. Header row required.
std::vector<GammaRecord> read_similarity_file(const std::string& path);

}  // namespace fairauc
