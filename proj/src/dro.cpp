#include "fairauc/dro.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fairauc {

GammaMatrix GammaMatrix::constant(int m, double gamma) {
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("GammaMatrix: gamma must be in [0,1]");
  GammaMatrix g;
  g.num_groups = m;
  g.values = Eigen::MatrixXd::Constant(m, m, gamma);
  return g;
}

bool GammaMatrix::defined(int z, int zp) const {
  return std::isfinite(values(z - 1, zp - 1));
}

PairDistribution empirical_pair_dist(const Batch& batch, int z, int zp) {
  const int pos = batch.pos_count_by_group[z - 1];
  const int neg = batch.neg_count_by_group[zp - 1];
  if (pos == 0 || neg == 0)
    throw std::invalid_argument("empirical_pair_dist: group pair (" + std::to_string(z) +
                                "," + std::to_string(zp) + ") has an empty side");
  PairDistribution p;
  p.group_pos = z;
  p.group_neg = zp;
  p.is_reference = true;
  p.weights.setZero(static_cast<int>(batch.pos_indices.size()),
                    static_cast<int>(batch.neg_indices.size()));
  const double mass = 1.0 / (static_cast<double>(pos) * neg);
  for (std::size_t i = 0; i < batch.pos_indices.size(); ++i) {
    if (batch.pos_groups[i] != z) continue;
    for (std::size_t j = 0; j < batch.neg_indices.size(); ++j)
      if (batch.neg_groups[j] == zp) p.weights(static_cast<int>(i), static_cast<int>(j)) = mass;
  }
  return p;
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  const long n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0, tau = 0.0;
  long rho = 0;
  for (long k = 0; k < n; ++k) {
    cumsum += u[k];
    const double t = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) {
      rho = k + 1;
      tau = t;
    }
  }
  (void)rho;
  return (v.array() - tau).max(0.0);
}

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, const Eigen::VectorXd& center,
                                double radius) {
  if (radius < 0.0) throw std::invalid_argument("project_l1_ball: negative radius");
  const Eigen::VectorXd w = v - center;
  const double l1 = w.lpNorm<1>();
  if (l1 <= radius) return v;
  if (radius == 0.0) return center;
  const long n = w.size();
  std::vector<double> a(n);
  for (long i = 0; i < n; ++i) a[i] = std::abs(w(i));
  std::sort(a.begin(), a.end(), std::greater<double>());
  double cumsum = 0.0, theta = 0.0;
  for (long k = 0; k < n; ++k) {
    cumsum += a[k];
    const double t = (cumsum - radius) / static_cast<double>(k + 1);
    if (a[k] > t) theta = t;
  }
  Eigen::VectorXd out(n);
  for (long i = 0; i < n; ++i) {
    const double mag = std::max(std::abs(w(i)) - theta, 0.0);
    out(i) = center(i) + (w(i) < 0.0 ? -mag : mag);
  }
  return out;
}

namespace {

// Feasibility guard: simplex point shrunk toward p_hat until the L1 budget
// holds. p_hat lies on the simplex, so the segment stays inside it.
Eigen::VectorXd shrink_to_ball(const Eigen::VectorXd& q, const Eigen::VectorXd& p_hat,
                               double l1_radius) {
  const Eigen::VectorXd diff = q - p_hat;
  const double l1 = diff.lpNorm<1>();
  if (l1 <= l1_radius) return q;
  return p_hat + (l1_radius / l1) * diff;
}

}  // namespace

Eigen::VectorXd project_tv_ball(const Eigen::VectorXd& p_tilde, const Eigen::VectorXd& p_hat,
                                double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("project_tv_ball: gamma must be >= 0");
  if (p_tilde.size() != p_hat.size())
    throw std::invalid_argument("project_tv_ball: dimension mismatch");
  if (gamma == 0.0) return p_hat;  // the ball is the single point p_hat

  const double radius = 2.0 * gamma;
  constexpr int kMaxIter = 500;
  constexpr double kTol = 1e-8;

  // Shortcut: if one set's projection already satisfies the other constraint
  // it is the projection onto the intersection.
  {
    Eigen::VectorXd s = project_simplex(p_tilde);
    if ((s - p_hat).lpNorm<1>() <= radius) return s;
  }

  // Dykstra's alternating projections with correction terms.
  Eigen::VectorXd x = p_tilde;
  Eigen::VectorXd inc_p = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd inc_q = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd y = x;
  for (int it = 0; it < kMaxIter; ++it) {
    y = project_simplex(x + inc_p);
    inc_p = x + inc_p - y;
    const Eigen::VectorXd x_next = project_l1_ball(y + inc_q, p_hat, radius);
    inc_q = y + inc_q - x_next;
    const double change = (x_next - x).lpNorm<Eigen::Infinity>();
    x = x_next;
    if (change < kTol && (x - y).lpNorm<Eigen::Infinity>() < kTol) break;
  }
  return shrink_to_ball(project_simplex(x), p_hat, radius);
}

PairDistribution project_tv_ball(const PairDistribution& p_tilde,
                                 const PairDistribution& p_hat, double gamma) {
  if (p_tilde.weights.rows() != p_hat.weights.rows() ||
      p_tilde.weights.cols() != p_hat.weights.cols())
    throw std::invalid_argument("project_tv_ball: pair matrix shape mismatch");
  const Eigen::VectorXd flat_tilde =
      Eigen::Map<const Eigen::VectorXd>(p_tilde.weights.data(), p_tilde.weights.size());
  const Eigen::VectorXd flat_hat =
      Eigen::Map<const Eigen::VectorXd>(p_hat.weights.data(), p_hat.weights.size());
  const Eigen::VectorXd projected = project_tv_ball(flat_tilde, flat_hat, gamma);
  PairDistribution out = p_tilde;
  out.is_reference = false;
  out.weights = Eigen::Map<const Eigen::MatrixXd>(projected.data(), p_tilde.weights.rows(),
                                                  p_tilde.weights.cols());
  return out;
}

Eigen::MatrixXd ascent_grad_pair_dist(const Eigen::MatrixXd& pair_matrix, double lambda) {
  return lambda * pair_matrix;
}

TvMaxResult greedy_tv_max(const Eigen::VectorXd& p_hat, const Eigen::VectorXd& values,
                          double gamma) {
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("greedy_tv_max: gamma must be in [0,1]");
  if (p_hat.size() != values.size())
    throw std::invalid_argument("greedy_tv_max: dimension mismatch");

  // Best coordinate; ties broken by lowest linear index.
  long best = 0;
  for (long i = 1; i < values.size(); ++i)
    if (values(i) > values(best)) best = i;

  Eigen::VectorXd q = p_hat;
  double budget = std::min(gamma, 1.0 - p_hat(best));
  if (budget > 0.0) {
    // Drain donors from the lowest value upward, never touching `best`.
    std::vector<long> order(p_hat.size());
    std::iota(order.begin(), order.end(), 0L);
    std::sort(order.begin(), order.end(), [&](long a, long b) {
      if (values(a) != values(b)) return values(a) < values(b);
      return a < b;
    });
    double moved = 0.0;
    for (long i : order) {
      if (i == best) continue;
      const double take = std::min(q(i), budget - moved);
      if (take <= 0.0) continue;
      q(i) -= take;
      moved += take;
      if (moved >= budget) break;
    }
    q(best) += moved;
  }
  TvMaxResult out;
  out.maximizer = q;
  out.value = q.dot(values);
  return out;
}

TvMaxResult greedy_tv_max(const PairDistribution& p_hat, const Eigen::MatrixXd& values,
                          double gamma) {
  const Eigen::VectorXd flat_hat =
      Eigen::Map<const Eigen::VectorXd>(p_hat.weights.data(), p_hat.weights.size());
  const Eigen::VectorXd flat_values =
      Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
  return greedy_tv_max(flat_hat, flat_values, gamma);
}

double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv_distance: shape mismatch");
  if (std::abs(p.sum() - 1.0) > 1e-6 || std::abs(q.sum() - 1.0) > 1e-6)
    throw std::invalid_argument("tv_distance: inputs must be normalized");
  if ((p.array() < -1e-12).any() || (q.array() < -1e-12).any())
    throw std::invalid_argument("tv_distance: inputs must be nonnegative");
  return 0.5 * (p - q).lpNorm<1>();
}

double tv_distance(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols())
    throw std::invalid_argument("tv_distance: shape mismatch");
  const Eigen::VectorXd pf = Eigen::Map<const Eigen::VectorXd>(p.data(), p.size());
  const Eigen::VectorXd qf = Eigen::Map<const Eigen::VectorXd>(q.data(), q.size());
  return tv_distance(pf, qf);
}

GammaMatrix estimate_gamma(const std::vector<GammaRecord>& records, int m) {
  if (records.empty()) throw std::invalid_argument("estimate_gamma: no records");
  std::vector<long> pos_total(m, 0), pos_clean(m, 0), neg_total(m, 0), neg_clean(m, 0);
  for (const auto& r : records) {
    if (r.group < 1 || r.group > m)
      throw std::invalid_argument("estimate_gamma: group " + std::to_string(r.group) +
                                  " out of range 1.." + std::to_string(m));
    if (r.label > 0) {
      ++pos_total[r.group - 1];
      if (r.clean()) ++pos_clean[r.group - 1];
    } else {
      ++neg_total[r.group - 1];
      if (r.clean()) ++neg_clean[r.group - 1];
    }
  }
  GammaMatrix g;
  g.num_groups = m;
  g.values.setConstant(m, m, std::numeric_limits<double>::quiet_NaN());
  for (int z = 0; z < m; ++z) {
    for (int zp = 0; zp < m; ++zp) {
      if (pos_total[z] == 0 || neg_total[zp] == 0) continue;
      const double f_pos = static_cast<double>(pos_clean[z]) / pos_total[z];
      const double f_neg = static_cast<double>(neg_clean[zp]) / neg_total[zp];
      g.values(z, zp) = 1.0 - f_pos * f_neg;
    }
  }
  return g;
}

std::vector<GammaRecord> read_similarity_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open similarity file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty similarity file: " + path);

  std::vector<GammaRecord> records;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5)
      throw std::runtime_error("similarity file row " + std::to_string(row) +
                               ": expected 5 columns id,label,group,sim_pos,sim_neg");
    try {
      GammaRecord r;
      r.id = std::stol(cells[0]);
      r.label = std::stoi(cells[1]);
      r.group = std::stoi(cells[2]);
      r.sim_pos = std::stod(cells[3]);
      r.sim_neg = std::stod(cells[4]);
      if (r.label != 1 && r.label != -1) throw std::invalid_argument("label");
      records.push_back(r);
    } catch (const std::exception&) {
      throw std::runtime_error("similarity file row " + std::to_string(row) +
                               ": malformed values");
    }
  }
  return records;
}

}  // namespace fairauc
