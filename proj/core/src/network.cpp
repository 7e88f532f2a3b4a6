#include "hexcell/network.hpp"

#include <cmath>
#include <stdexcept>

#include "hexcell/rng.hpp"

namespace hexcell {

const char* BlockName(int block) {
  static const char* kNames[kNumBlocks] = {
      "embed_w", "embed_b",  "query_w",  "key_w",  "value_w", "out_w",
      "trunk1_w", "trunk1_b", "trunk2_w", "trunk2_b", "head_w", "head_b"};
  if (block < 0 || block >= kNumBlocks) return "?";
  return kNames[block];
}

NetParams NetParams::Zeros(const NetShape& s) {
  NetParams p;
  p.shape = s;
  p.blocks.resize(kNumBlocks);
  p.blocks[kEmbedW] = Mat::Zero(s.channels, s.d_model);
  p.blocks[kEmbedB] = Mat::Zero(1, s.d_model);
  p.blocks[kQueryW] = Mat::Zero(s.d_model, s.d_key);
  p.blocks[kKeyW] = Mat::Zero(s.d_model, s.d_key);
  p.blocks[kValueW] = Mat::Zero(s.d_model, s.d_model);
  p.blocks[kOutW] = Mat::Zero(s.d_model, s.d_model);
  p.blocks[kTrunk1W] = Mat::Zero(s.d_model, s.hidden);
  p.blocks[kTrunk1B] = Mat::Zero(1, s.hidden);
  p.blocks[kTrunk2W] = Mat::Zero(s.hidden, s.hidden);
  p.blocks[kTrunk2B] = Mat::Zero(1, s.hidden);
  p.blocks[kHeadW] = Mat::Zero(s.hidden, s.outputs);
  p.blocks[kHeadB] = Mat::Zero(1, s.outputs);
  return p;
}

std::size_t NetParams::NumScalars() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += static_cast<std::size_t>(b.size());
  return n;
}

void NetParams::SetZero() {
  for (auto& b : blocks) b.setZero();
}

int NetParams::FirstNonFinite() const {
  for (int i = 0; i < static_cast<int>(blocks.size()); ++i) {
    if (!blocks[i].allFinite()) return i;
  }
  return -1;
}

bool NetParams::AllFinite() const { return FirstNonFinite() < 0; }

NetParams InitParams(const NetShape& shape, uint64_t seed, double head_scale) {
  NetParams p = NetParams::Zeros(shape);
  Rng rng(seed);
  auto fill = [&](Mat& m, double scale) {
    const double limit = scale * std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.Uniform(-limit, limit);
    }
  };
  fill(p.blocks[kEmbedW], 1.0);
  fill(p.blocks[kQueryW], 1.0);
  fill(p.blocks[kKeyW], 1.0);
  fill(p.blocks[kValueW], 1.0);
  fill(p.blocks[kOutW], 1.0);
  fill(p.blocks[kTrunk1W], 1.0);
  fill(p.blocks[kTrunk2W], 1.0);
  fill(p.blocks[kHeadW], head_scale);
  return p;
}

Mat PositionalEncoding(int side, int d_model) {
  Mat pe = Mat::Zero(side * side, d_model);
  const int half = d_model / 2;
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const int tok = r * side + c;
      for (int i = 0; i < half; ++i) {
        const double freq = std::pow(10000.0, -2.0 * (i / 2) / std::max(1, half));
        const double a = r * freq;
        const double b = c * freq;
        pe(tok, i) = (i % 2 == 0) ? std::sin(a) : std::cos(a);
        pe(tok, half + i) = (i % 2 == 0) ? std::sin(b) : std::cos(b);
      }
    }
  }
  return pe;
}

Network::Network(NetParams params)
    : params_(std::move(params)),
      pos_(PositionalEncoding(params_.shape.side, params_.shape.d_model)) {}

RowVec Network::Forward(const Mat& x, ForwardCache* cache) const {
  const NetShape& s = params_.shape;
  if (x.rows() != s.tokens() || x.cols() != s.channels) {
    throw std::invalid_argument("Network::Forward: input shape mismatch");
  }
  const auto& w = params_.blocks;
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.x = x;
  c.e = x * w[kEmbedW];
  c.e.rowwise() += w[kEmbedB].row(0);
  c.e += pos_;
  c.q = c.e * w[kQueryW];
  c.k = c.e * w[kKeyW];
  c.v = (c.e * w[kValueW]).array().tanh().matrix();
  Mat scores = (c.q * c.k.transpose()) / std::sqrt(static_cast<double>(s.d_key));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double mx = scores.row(i).maxCoeff();
    scores.row(i) = (scores.row(i).array() - mx).exp().matrix();
    scores.row(i) /= scores.row(i).sum();
  }
  c.a = std::move(scores);
  c.z = c.a * c.v;
  // H = E + Z Wo, mean-pooled over tokens.
  c.pooled = c.e.colwise().mean() + c.z.colwise().mean() * w[kOutW];
  c.h1 = (c.pooled * w[kTrunk1W] + w[kTrunk1B].row(0)).array().tanh().matrix();
  c.h2 = (c.h1 * w[kTrunk2W] + w[kTrunk2B].row(0)).array().tanh().matrix();
  return c.h2 * w[kHeadW] + w[kHeadB].row(0);
}

void Network::Backward(const ForwardCache& c, const RowVec& d_out,
                       NetParams& g) const {
  const NetShape& s = params_.shape;
  const auto& w = params_.blocks;
  const double n = static_cast<double>(s.tokens());

  g.blocks[kHeadW].noalias() += c.h2.transpose() * d_out;
  g.blocks[kHeadB].row(0) += d_out;
  RowVec dh2 = d_out * w[kHeadW].transpose();
  RowVec da2 = dh2.array() * (1.0 - c.h2.array().square());
  g.blocks[kTrunk2W].noalias() += c.h1.transpose() * da2;
  g.blocks[kTrunk2B].row(0) += da2;
  RowVec dh1 = da2 * w[kTrunk2W].transpose();
  RowVec da1 = dh1.array() * (1.0 - c.h1.array().square());
  g.blocks[kTrunk1W].noalias() += c.pooled.transpose() * da1;
  g.blocks[kTrunk1B].row(0) += da1;
  RowVec dp = da1 * w[kTrunk1W].transpose();

  // Every token row of H receives dp / n.
  const RowVec dh_row = dp / n;
  // O = Z Wo: dWo = Z^T dO with dO = 1 dh_row.
  g.blocks[kOutW].noalias() += c.z.colwise().sum().transpose() * dh_row;
  const RowVec dz_row = dh_row * w[kOutW].transpose();
  // dZ = 1 dz_row; dA = dZ V^T, dV = A^T dZ.
  const Eigen::VectorXd v_dz = c.v * dz_row.transpose();  // (V dz^T), per column j
  Mat da(c.a.rows(), c.a.cols());
  for (Eigen::Index i = 0; i < da.rows(); ++i) da.row(i) = v_dz.transpose();
  const Eigen::VectorXd a_colsum = c.a.colwise().sum().transpose();
  Mat dv = a_colsum * dz_row;

  // Softmax backward, then the 1/sqrt(d_key) scaling.
  Mat ds = c.a.array() * (da.array().colwise() -
                          (da.array() * c.a.array()).rowwise().sum());
  ds /= std::sqrt(static_cast<double>(s.d_key));
  const Mat dq = ds * c.k;
  const Mat dk = ds.transpose() * c.q;
  const Mat dv_pre = dv.array() * (1.0 - c.v.array().square());

  g.blocks[kQueryW].noalias() += c.e.transpose() * dq;
  g.blocks[kKeyW].noalias() += c.e.transpose() * dk;
  g.blocks[kValueW].noalias() += c.e.transpose() * dv_pre;

  Mat de = dq * w[kQueryW].transpose();
  de.noalias() += dk * w[kKeyW].transpose();
  de.noalias() += dv_pre * w[kValueW].transpose();
  de.rowwise() += dh_row;  // residual path

  g.blocks[kEmbedW].noalias() += c.x.transpose() * de;
  g.blocks[kEmbedB].row(0) += de.colwise().sum();
}

}  // namespace hexcell
