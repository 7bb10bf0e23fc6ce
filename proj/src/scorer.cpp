#include "fairauc/scorer.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "fairauc/rng.hpp"

namespace fairauc {

long MlpParams::parameter_count() const {
  return w1.size() + b1.size() + w2.size() + b2.size() + w3.size() + b3.size();
}

namespace {

Eigen::MatrixXd glorot(int rows, int cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / (rows + cols));
  Eigen::MatrixXd w(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) w(r, c) = uniform_range(rng, -bound, bound);
  return w;
}

void check_finite(const Eigen::MatrixXd& m, const char* where) {
  if (!m.allFinite())
    throw std::runtime_error(std::string("non-finite values in ") + where);
}

}  // namespace

MlpParams make_mlp(int input_dim, int h1, int h2, std::uint64_t seed) {
  if (input_dim < 1 || h1 < 1 || h2 < 1)
    throw std::invalid_argument("make_mlp: layer widths must be positive");
  Rng rng(seed);
  MlpParams p;
  p.w1 = glorot(h1, input_dim, rng);
  p.b1 = Eigen::VectorXd::Zero(h1);
  p.w2 = glorot(h2, h1, rng);
  p.b2 = Eigen::VectorXd::Zero(h2);
  p.w3 = glorot(1, h2, rng);
  p.b3 = Eigen::VectorXd::Zero(1);
  return p;
}

MlpParams zeros_like(const MlpParams& p) {
  MlpParams z;
  z.w1 = Eigen::MatrixXd::Zero(p.w1.rows(), p.w1.cols());
  z.b1 = Eigen::VectorXd::Zero(p.b1.size());
  z.w2 = Eigen::MatrixXd::Zero(p.w2.rows(), p.w2.cols());
  z.b2 = Eigen::VectorXd::Zero(p.b2.size());
  z.w3 = Eigen::MatrixXd::Zero(p.w3.rows(), p.w3.cols());
  z.b3 = Eigen::VectorXd::Zero(p.b3.size());
  return z;
}

Eigen::VectorXd forward(const MlpParams& p, const Eigen::MatrixXd& features) {
  if (features.cols() != p.input_dim())
    throw std::invalid_argument("forward: feature width " + std::to_string(features.cols()) +
                                " does not match input layer " + std::to_string(p.input_dim()));
  const Eigen::MatrixXd a1 =
      ((features * p.w1.transpose()).rowwise() + p.b1.transpose()).array().tanh();
  const Eigen::MatrixXd a2 =
      ((a1 * p.w2.transpose()).rowwise() + p.b2.transpose()).array().tanh();
  return (a2 * p.w3.transpose()).col(0).array() + p.b3(0);
}

GradResult grad(const MlpParams& p, const Eigen::MatrixXd& features, const LossAssembly& loss) {
  if (features.cols() != p.input_dim())
    throw std::invalid_argument("grad: feature width does not match input layer");

  const Eigen::MatrixXd z1 = (features * p.w1.transpose()).rowwise() + p.b1.transpose();
  const Eigen::MatrixXd a1 = z1.array().tanh();
  check_finite(a1, "layer 1 activations");
  const Eigen::MatrixXd z2 = (a1 * p.w2.transpose()).rowwise() + p.b2.transpose();
  const Eigen::MatrixXd a2 = z2.array().tanh();
  check_finite(a2, "layer 2 activations");
  const Eigen::VectorXd scores = (a2 * p.w3.transpose()).col(0).array() + p.b3(0);
  check_finite(scores, "output scores");

  LossGrad lg = loss(scores);
  if (!std::isfinite(lg.value) || !lg.dscores.allFinite())
    throw std::runtime_error("non-finite values in loss assembly");
  if (lg.dscores.size() != scores.size())
    throw std::invalid_argument("grad: loss gradient length mismatch");

  GradResult out;
  out.loss = lg.value;
  out.grad.w3 = lg.dscores.transpose() * a2;                       // 1 x h2
  out.grad.b3 = Eigen::VectorXd::Constant(1, lg.dscores.sum());
  Eigen::MatrixXd da2 = lg.dscores * p.w3;                         // n x h2
  Eigen::MatrixXd dz2 = da2.array() * (1.0 - a2.array().square());
  check_finite(dz2, "layer 2 backward");
  out.grad.w2 = dz2.transpose() * a1;
  out.grad.b2 = dz2.colwise().sum().transpose();
  Eigen::MatrixXd da1 = dz2 * p.w2;
  Eigen::MatrixXd dz1 = da1.array() * (1.0 - a1.array().square());
  check_finite(dz1, "layer 1 backward");
  out.grad.w1 = dz1.transpose() * features;
  out.grad.b1 = dz1.colwise().sum().transpose();
  return out;
}

MlpParams sam_perturb(const MlpParams& p, const MlpParams& gradient, const SamConfig& sam) {
  if (sam.nu < 0.0) throw std::invalid_argument("sam_perturb: nu must be >= 0");
  const Eigen::VectorXd g = flatten(gradient);
  const double norm = g.norm();
  if (sam.nu == 0.0 || norm == 0.0) return p;
  const Eigen::VectorXd flat = flatten(p) + (sam.nu / norm) * g;
  return unflatten(flat, p.input_dim(), p.hidden1(), p.hidden2());
}

MlpParams sgd_step(const MlpParams& p, const MlpParams& gradient, double eta) {
  if (eta <= 0.0) throw std::invalid_argument("sgd_step: eta must be positive");
  MlpParams out = p;
  out.w1 -= eta * gradient.w1;
  out.b1 -= eta * gradient.b1;
  out.w2 -= eta * gradient.w2;
  out.b2 -= eta * gradient.b2;
  out.w3 -= eta * gradient.w3;
  out.b3 -= eta * gradient.b3;
  return out;
}

Eigen::VectorXd flatten(const MlpParams& p) {
  Eigen::VectorXd flat(p.parameter_count());
  long at = 0;
  auto put_matrix = [&](const Eigen::MatrixXd& m) {
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) flat(at++) = m(r, c);
  };
  auto put_vector = [&](const Eigen::VectorXd& v) {
    for (int i = 0; i < v.size(); ++i) flat(at++) = v(i);
  };
  put_matrix(p.w1);
  put_vector(p.b1);
  put_matrix(p.w2);
  put_vector(p.b2);
  put_matrix(p.w3);
  put_vector(p.b3);
  return flat;
}

MlpParams unflatten(const Eigen::VectorXd& flat, int input_dim, int h1, int h2) {
  MlpParams p;
  p.w1.resize(h1, input_dim);
  p.b1.resize(h1);
  p.w2.resize(h2, h1);
  p.b2.resize(h2);
  p.w3.resize(1, h2);
  p.b3.resize(1);
  if (flat.size() != p.parameter_count())
    throw std::invalid_argument("unflatten: flat vector length does not match dimensions");
  long at = 0;
  auto get_matrix = [&](Eigen::MatrixXd& m) {
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) m(r, c) = flat(at++);
  };
  auto get_vector = [&](Eigen::VectorXd& v) {
    for (int i = 0; i < v.size(); ++i) v(i) = flat(at++);
  };
  get_matrix(p.w1);
  get_vector(p.b1);
  get_matrix(p.w2);
  get_vector(p.b2);
  get_matrix(p.w3);
  get_vector(p.b3);
  return p;
}

namespace {

void write_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ofstream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t read_u32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::ifstream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void save_checkpoint(const MlpParams& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  write_u32(out, static_cast<std::uint32_t>(p.input_dim()));
  write_u32(out, static_cast<std::uint32_t>(p.hidden1()));
  write_u32(out, static_cast<std::uint32_t>(p.hidden2()));
  const Eigen::VectorXd flat = flatten(p);
  write_u64(out, static_cast<std::uint64_t>(flat.size()));
  for (long i = 0; i < flat.size(); ++i) {
    std::uint64_t bits;
    const double v = flat(i);
    std::memcpy(&bits, &v, 8);
    write_u64(out, bits);
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

MlpParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  const int d = static_cast<int>(read_u32(in));
  const int h1 = static_cast<int>(read_u32(in));
  const int h2 = static_cast<int>(read_u32(in));
  const std::uint64_t count = read_u64(in);
  Eigen::VectorXd flat(static_cast<long>(count));
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t bits = read_u64(in);
    double v;
    std::memcpy(&v, &bits, 8);
    flat(static_cast<long>(i)) = v;
  }
  if (!in) throw std::runtime_error("checkpoint truncated: " + path);
  return unflatten(flat, d, h1, h2);
}

}  // namespace fairauc
