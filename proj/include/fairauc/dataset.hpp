#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "fairauc/rng.hpp"

namespace fairauc {

// Column layout of a delimited text file (comma separator, header row).
struct ColumnSchema {
  std::string label_column;
  std::string positive_label;  // token mapped to +1, everything else -1
  std::string group_column;
  std::vector<std::string> numeric_columns;
  std::vector<std::string> categorical_columns;
};

struct Dataset {
  Eigen::MatrixXd features;        // n x d, encoded
  std::vector<int> labels;         // +1 / -1
  std::vector<int> noisy_groups;   // 1..m, what training sees
  std::vector<int> clean_groups;   // 1..m, evaluation only; empty if unknown
  int num_groups = 0;

  std::vector<std::string> feature_names;
  std::vector<int> numeric_feature_idx;  // columns subject to standardization
  std::vector<std::string> group_names;  // group id-1 -> source token

  int size() const { return static_cast<int>(labels.size()); }
  bool has_clean_groups() const { return !clean_groups.empty(); }
};

// Stratified mini-batch: one index list per (group, label) stratum plus the
// flattened positive/negative views the pairwise losses consume.
struct Batch {
  // strata[z-1][0] = positives of group z, strata[z-1][1] = negatives.
  std::vector<std::array<std::vector<int>, 2>> strata;

  std::vector<int> pos_indices, neg_indices;  // dataset row ids
  std::vector<int> pos_groups, neg_groups;    // aligned with the above
  std::vector<int> pos_count_by_group, neg_count_by_group;  // size m

  // (z, y) strata that were empty in the dataset; informational only.
  std::vector<std::pair<int, int>> empty_strata;

  int num_groups = 0;
  int size() const { return static_cast<int>(pos_indices.size() + neg_indices.size()); }
};

struct SplitResult {
  Dataset train, val, test;
  std::vector<int> train_idx, val_idx, test_idx;  // rows of the source dataset
};

Dataset load_tabular(const std::string& path, const ColumnSchema& schema);

// Floor-sized shuffled partition, remainder rows go to train. Numeric columns
// are re-standardized with statistics of the train split only.
SplitResult split(const Dataset& ds, const std::array<double, 3>& ratios,
                  std::uint64_t seed);

// Flips exactly floor(rho*n) group labels, each to a uniformly random other
// group. Original labels are preserved in clean_groups.
Dataset inject_group_noise(const Dataset& ds, double rho, std::uint64_t seed);

Batch stratified_sample(const Dataset& ds, int batch_size, Rng& rng);

// Whole dataset as a single batch (full-batch training and evaluation).
Batch full_batch(const Dataset& ds);

Dataset select_rows(const Dataset& ds, const std::vector<int>& rows);

}  // namespace fairauc
