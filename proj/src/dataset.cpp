#include "fairauc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fairauc/errors.hpp"

namespace fairauc {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim surrounding whitespace
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

int column_index(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end())
    throw ConfigError("schema error: column '" + name + "' not found in header");
  return static_cast<int>(it - header.begin());
}

// Population statistics; applied in place to the given column.
void standardize_column(Eigen::MatrixXd& features, int col, double mean, double stddev) {
  const double denom = stddev > 1e-12 ? stddev : 1.0;
  features.col(col) = (features.col(col).array() - mean) / denom;
}

}  // namespace

Dataset load_tabular(const std::string& path, const ColumnSchema& schema) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset file: " + path);
  const auto header = split_line(line);

  const int label_col = column_index(header, schema.label_column);
  const int group_col = column_index(header, schema.group_column);
  std::vector<int> numeric_cols, categorical_cols;
  for (const auto& c : schema.numeric_columns) numeric_cols.push_back(column_index(header, c));
  for (const auto& c : schema.categorical_columns) categorical_cols.push_back(column_index(header, c));

  std::vector<std::vector<double>> numeric_rows;
  std::vector<std::vector<std::string>> categorical_rows;
  std::vector<int> labels;
  std::vector<std::string> group_tokens;

  int row_number = 1;  // header was row 1
  while (std::getline(in, line)) {
    ++row_number;
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("parse error at row " + std::to_string(row_number) +
                               ": expected " + std::to_string(header.size()) +
                               " cells, got " + std::to_string(cells.size()));

    std::vector<double> nums;
    nums.reserve(numeric_cols.size());
    for (std::size_t k = 0; k < numeric_cols.size(); ++k) {
      const std::string& cell = cells[numeric_cols[k]];
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        nums.push_back(v);
      } catch (const std::exception&) {
        throw std::runtime_error("parse error at row " + std::to_string(row_number) +
                                 ": non-numeric value '" + cell + "' in column '" +
                                 schema.numeric_columns[k] + "'");
      }
    }
    std::vector<std::string> cats;
    cats.reserve(categorical_cols.size());
    for (int c : categorical_cols) cats.push_back(cells[c]);

    labels.push_back(cells[label_col] == schema.positive_label ? 1 : -1);
    group_tokens.push_back(cells[group_col]);
    numeric_rows.push_back(std::move(nums));
    categorical_rows.push_back(std::move(cats));
  }

  const int n = static_cast<int>(labels.size());
  if (n == 0) throw std::runtime_error("dataset has no data rows: " + path);

  // Group ids 1..m in sorted token order, so the mapping is deterministic.
  std::vector<std::string> group_names(group_tokens.begin(), group_tokens.end());
  std::sort(group_names.begin(), group_names.end());
  group_names.erase(std::unique(group_names.begin(), group_names.end()), group_names.end());
  std::map<std::string, int> group_id;
  for (std::size_t i = 0; i < group_names.size(); ++i) group_id[group_names[i]] = static_cast<int>(i) + 1;

  // Category levels per categorical column, sorted for determinism.
  std::vector<std::vector<std::string>> levels(categorical_cols.size());
  for (std::size_t k = 0; k < categorical_cols.size(); ++k) {
    std::vector<std::string> vals;
    vals.reserve(n);
    for (int i = 0; i < n; ++i) vals.push_back(categorical_rows[i][k]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    levels[k] = std::move(vals);
  }

  int d = static_cast<int>(numeric_cols.size());
  for (const auto& lv : levels) d += static_cast<int>(lv.size());

  Dataset ds;
  ds.features.setZero(n, d);
  ds.labels = std::move(labels);
  ds.noisy_groups.resize(n);
  for (int i = 0; i < n; ++i) ds.noisy_groups[i] = group_id[group_tokens[i]];
  ds.num_groups = static_cast<int>(group_names.size());
  ds.group_names = std::move(group_names);

  for (std::size_t k = 0; k < numeric_cols.size(); ++k) {
    ds.feature_names.push_back(schema.numeric_columns[k]);
    ds.numeric_feature_idx.push_back(static_cast<int>(k));
    for (int i = 0; i < n; ++i) ds.features(i, static_cast<int>(k)) = numeric_rows[i][k];
  }
  int col = static_cast<int>(numeric_cols.size());
  for (std::size_t k = 0; k < categorical_cols.size(); ++k) {
    std::map<std::string, int> level_id;
    for (std::size_t l = 0; l < levels[k].size(); ++l) {
      level_id[levels[k][l]] = col;
      ds.feature_names.push_back(schema.categorical_columns[k] + "=" + levels[k][l]);
      ++col;
    }
    for (int i = 0; i < n; ++i) ds.features(i, level_id[categorical_rows[i][k]]) = 1.0;
  }

  // Zero mean, unit variance over the loaded rows; split() re-anchors these
  // statistics on the training partition.
  for (int c : ds.numeric_feature_idx) {
    const double mean = ds.features.col(c).mean();
    const double var = (ds.features.col(c).array() - mean).square().mean();
    standardize_column(ds.features, c, mean, std::sqrt(var));
  }
  return ds;
}

Dataset select_rows(const Dataset& ds, const std::vector<int>& rows) {
  Dataset out;
  out.features.resize(static_cast<int>(rows.size()), ds.features.cols());
  out.labels.reserve(rows.size());
  out.noisy_groups.reserve(rows.size());
  if (ds.has_clean_groups()) out.clean_groups.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int r = rows[i];
    out.features.row(static_cast<int>(i)) = ds.features.row(r);
    out.labels.push_back(ds.labels[r]);
    out.noisy_groups.push_back(ds.noisy_groups[r]);
    if (ds.has_clean_groups()) out.clean_groups.push_back(ds.clean_groups[r]);
  }
  out.num_groups = ds.num_groups;
  out.feature_names = ds.feature_names;
  out.numeric_feature_idx = ds.numeric_feature_idx;
  out.group_names = ds.group_names;
  return out;
}

SplitResult split(const Dataset& ds, const std::array<double, 3>& ratios, std::uint64_t seed) {
  const int n = ds.size();
  if (n == 0) throw std::invalid_argument("split: empty dataset");
  for (double r : ratios)
    if (r <= 0.0) throw std::invalid_argument("split: ratios must be positive");
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9)
    throw std::invalid_argument("split: ratios must sum to 1");

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  shuffle_vec(perm, rng);

  const int n_val = static_cast<int>(std::floor(ratios[1] * n));
  const int n_test = static_cast<int>(std::floor(ratios[2] * n));
  const int n_train = n - n_val - n_test;  // floor(r0*n) plus the remainder

  SplitResult out;
  out.train_idx.assign(perm.begin(), perm.begin() + n_train);
  out.val_idx.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
  out.test_idx.assign(perm.begin() + n_train + n_val, perm.end());
  out.train = select_rows(ds, out.train_idx);
  out.val = select_rows(ds, out.val_idx);
  out.test = select_rows(ds, out.test_idx);

  // Standardization statistics come from the train split only.
  for (int c : ds.numeric_feature_idx) {
    const double mean = out.train.features.col(c).mean();
    const double var = (out.train.features.col(c).array() - mean).square().mean();
    const double sd = std::sqrt(var);
    standardize_column(out.train.features, c, mean, sd);
    standardize_column(out.val.features, c, mean, sd);
    standardize_column(out.test.features, c, mean, sd);
  }
  return out;
}

Dataset inject_group_noise(const Dataset& ds, double rho, std::uint64_t seed) {
  if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("inject_group_noise: rho must be in [0,1]");
  Dataset out = ds;
  if (!out.has_clean_groups()) out.clean_groups = out.noisy_groups;

  const int n = out.size();
  const int flips = static_cast<int>(std::floor(rho * n));
  if (flips == 0) return out;
  if (out.num_groups < 2)
    throw std::invalid_argument("inject_group_noise: cannot flip with fewer than 2 groups");

  std::vector<int> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  Rng rng(seed);
  const auto chosen = sample_without_replacement(std::move(rows), static_cast<std::size_t>(flips), rng);
  for (int r : chosen) {
    const int current = out.noisy_groups[r];
    // uniform over the other m-1 groups
    int g = static_cast<int>(uniform_below(rng, static_cast<std::size_t>(out.num_groups - 1))) + 1;
    if (g >= current) ++g;
    out.noisy_groups[r] = g;
  }
  return out;
}

Batch stratified_sample(const Dataset& ds, int batch_size, Rng& rng) {
  const int n = ds.size();
  const int m = ds.num_groups;
  if (n == 0) throw std::invalid_argument("stratified_sample: empty dataset");

  std::vector<std::array<std::vector<int>, 2>> strata(m);
  for (int i = 0; i < n; ++i) {
    const int z = ds.noisy_groups[i];
    strata[z - 1][ds.labels[i] > 0 ? 0 : 1].push_back(i);
  }

  int nonempty = 0;
  for (const auto& s : strata) nonempty += (!s[0].empty()) + (!s[1].empty());
  if (batch_size < nonempty)
    throw std::invalid_argument("stratified_sample: batch size below stratum count");

  Batch batch;
  batch.num_groups = m;
  batch.strata.resize(m);
  batch.pos_count_by_group.assign(m, 0);
  batch.neg_count_by_group.assign(m, 0);

  for (int z = 1; z <= m; ++z) {
    for (int side = 0; side < 2; ++side) {
      const auto& pool = strata[z - 1][side];
      if (pool.empty()) {
        batch.empty_strata.emplace_back(z, side == 0 ? 1 : -1);
        continue;
      }
      // ceil(b * |stratum| / n), capped at the stratum size
      std::size_t want = static_cast<std::size_t>(
          (static_cast<long long>(batch_size) * pool.size() + n - 1) / n);
      if (want > pool.size()) want = pool.size();
      auto draw = sample_without_replacement(pool, want, rng);
      for (int idx : draw) {
        if (side == 0) {
          batch.pos_indices.push_back(idx);
          batch.pos_groups.push_back(z);
          ++batch.pos_count_by_group[z - 1];
        } else {
          batch.neg_indices.push_back(idx);
          batch.neg_groups.push_back(z);
          ++batch.neg_count_by_group[z - 1];
        }
      }
      batch.strata[z - 1][side] = std::move(draw);
    }
  }
  return batch;
}

Batch full_batch(const Dataset& ds) {
  const int m = ds.num_groups;
  Batch batch;
  batch.num_groups = m;
  batch.strata.resize(m);
  batch.pos_count_by_group.assign(m, 0);
  batch.neg_count_by_group.assign(m, 0);
  for (int i = 0; i < ds.size(); ++i) {
    const int z = ds.noisy_groups[i];
    if (ds.labels[i] > 0) {
      batch.strata[z - 1][0].push_back(i);
      batch.pos_indices.push_back(i);
      batch.pos_groups.push_back(z);
      ++batch.pos_count_by_group[z - 1];
    } else {
      batch.strata[z - 1][1].push_back(i);
      batch.neg_indices.push_back(i);
      batch.neg_groups.push_back(z);
      ++batch.neg_count_by_group[z - 1];
    }
  }
  for (int z = 1; z <= m; ++z) {
    if (batch.strata[z - 1][0].empty()) batch.empty_strata.emplace_back(z, 1);
    if (batch.strata[z - 1][1].empty()) batch.empty_strata.emplace_back(z, -1);
  }
  return batch;
}

}  // namespace fairauc
