#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hexcell {

using RowVec = Eigen::RowVectorXd;
using Mat = Eigen::MatrixXd;

// Token-level attention encoder followed by a tanh trunk and a linear output
// layer. Inputs are (tokens x channels) matrices, one row per grid square.
struct NetShape {
  int side = 5;        // tokens = side * side
  int channels = 10;   // 2 eta
  int d_model = 32;
  int d_key = 16;
  int hidden = 64;
  int outputs = 1;

  int tokens() const { return side * side; }
  friend bool operator==(const NetShape&, const NetShape&) = default;
};

// Parameter block indices.
enum Block : int {
  kEmbedW = 0,  // channels x d_model
  kEmbedB,      // 1 x d_model
  kQueryW,      // d_model x d_key
  kKeyW,        // d_model x d_key
  kValueW,      // d_model x d_model
  kOutW,        // d_model x d_model
  kTrunk1W,     // d_model x hidden
  kTrunk1B,     // 1 x hidden
  kTrunk2W,     // hidden x hidden
  kTrunk2B,     // 1 x hidden
  kHeadW,       // hidden x outputs
  kHeadB,       // 1 x outputs
  kNumBlocks
};

const char* BlockName(int block);

// A full set of parameters, or a gradient of the same layout.
struct NetParams {
  NetShape shape;
  std::vector<Mat> blocks;

  static NetParams Zeros(const NetShape& shape);
  std::size_t NumScalars() const;
  void SetZero();
  bool AllFinite() const;
  // First block holding a NaN or infinity, or -1.
  int FirstNonFinite() const;
};

// Scaled uniform initialisation. head_scale shrinks the output layer so that
// a fresh policy is close to uniform.
NetParams InitParams(const NetShape& shape, uint64_t seed, double head_scale);

// Fixed 2-D sinusoidal positional code, tokens x d_model. The first half of
// the features encodes the row, the second half the column.
Mat PositionalEncoding(int side, int d_model);

struct ForwardCache {
  Mat x;       // input
  Mat e;       // embeddings incl. position
  Mat q, k;
  Mat v;       // tanh(E Wv)
  Mat a;       // attention weights
  Mat z;       // A V
  RowVec pooled;
  RowVec h1, h2;
};

class Network {
 public:
  Network() = default;
  explicit Network(NetParams params);

  const NetShape& shape() const { return params_.shape; }
  const NetParams& params() const { return params_; }
  NetParams& mutable_params() { return params_; }

  // Throws std::invalid_argument on an input of the wrong shape.
  RowVec Forward(const Mat& x, ForwardCache* cache = nullptr) const;
  // Accumulates d(loss)/d(params) into grad given d(loss)/d(output).
  void Backward(const ForwardCache& cache, const RowVec& d_out,
                NetParams& grad) const;

 private:
  NetParams params_;
  Mat pos_;
};

}  // namespace hexcell
