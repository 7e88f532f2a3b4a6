#include "hexcell/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hexcell {

namespace {

constexpr char kMagic[4] = {'H', 'X', 'C', 'K'};

class Writer {
 public:
  void U32(uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void U64(uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void I32(int32_t v) { U32(static_cast<uint32_t>(v)); }
  void I64(int64_t v) { U64(static_cast<uint64_t>(v)); }
  void F64(double v) { U64(std::bit_cast<uint64_t>(v)); }
  void Str(const std::string& s) {
    U32(static_cast<uint32_t>(s.size()));
    out_ += s;
  }
  void Raw(const char* p, std::size_t n) { out_.append(p, n); }
  std::string Take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}
  uint32_t U32() {
    Need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  uint64_t U64() {
    Need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  int32_t I32() { return static_cast<int32_t>(U32()); }
  int64_t I64() { return static_cast<int64_t>(U64()); }
  double F64() { return std::bit_cast<double>(U64()); }
  std::string Str() {
    const uint32_t n = U32();
    Need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string Raw(std::size_t n) {
    Need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool AtEnd() const { return pos_ == in_.size(); }

 private:
  void Need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw CheckpointError("checkpoint is truncated");
  }
  const std::string& in_;
  std::size_t pos_ = 0;
};

void WriteShape(Writer& w, const NetShape& s) {
  for (int v : {s.side, s.channels, s.d_model, s.d_key, s.hidden, s.outputs}) w.I32(v);
}

NetShape ReadShape(Reader& r) {
  NetShape s;
  s.side = r.I32();
  s.channels = r.I32();
  s.d_model = r.I32();
  s.d_key = r.I32();
  s.hidden = r.I32();
  s.outputs = r.I32();
  if (s.side < 1 || s.channels < 1 || s.d_model < 1 || s.d_key < 1 ||
      s.hidden < 1 || s.outputs < 1) {
    throw CheckpointError("checkpoint holds an invalid network shape");
  }
  return s;
}

void WriteBlocks(Writer& w, const NetParams& p) {
  w.U32(static_cast<uint32_t>(p.blocks.size()));
  for (const Mat& m : p.blocks) {
    w.U32(static_cast<uint32_t>(m.rows()));
    w.U32(static_cast<uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) w.F64(m.data()[i]);
  }
}

NetParams ReadBlocks(Reader& r, const NetShape& shape) {
  NetParams p = NetParams::Zeros(shape);
  const uint32_t n = r.U32();
  if (n != p.blocks.size()) throw CheckpointError("checkpoint block count mismatch");
  for (uint32_t b = 0; b < n; ++b) {
    const uint32_t rows = r.U32();
    const uint32_t cols = r.U32();
    Mat& m = p.blocks[b];
    if (rows != m.rows() || cols != m.cols()) {
      std::ostringstream os;
      os << "checkpoint block " << BlockName(b) << " is " << rows << "x" << cols
         << ", expected " << m.rows() << "x" << m.cols();
      throw CheckpointError(os.str());
    }
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = r.F64();
  }
  return p;
}

void WriteNet(Writer& w, const NetParams& p, const AdamState& adam) {
  WriteShape(w, p.shape);
  WriteBlocks(w, p);
  w.I64(adam.step);
  WriteBlocks(w, adam.m);
  WriteBlocks(w, adam.v);
}

void ReadNet(Reader& r, NetParams& p, AdamState& adam) {
  const NetShape shape = ReadShape(r);
  p = ReadBlocks(r, shape);
  adam.step = r.I64();
  adam.m = ReadBlocks(r, shape);
  adam.v = ReadBlocks(r, shape);
}

}  // namespace

AgentBlob Snapshot(const Agent& a) {
  return {a.policy().params(), a.value().params(), a.policy_adam(), a.value_adam()};
}

Agent Restore(const AgentBlob& b, const PpoConfig& config) {
  Agent a(b.policy, b.value, config);
  a.policy_adam() = b.policy_adam;
  a.value_adam() = b.value_adam;
  return a;
}

std::string SerializeCheckpoint(const Checkpoint& c) {
  Writer w;
  w.Raw(kMagic, 4);
  w.U32(kCheckpointVersion);
  w.Str(c.config_hash);
  w.I64(c.episodes);
  w.U32(static_cast<uint32_t>(c.agents.size()));
  for (const auto& a : c.agents) {
    WriteNet(w, a.policy, a.policy_adam);
    WriteNet(w, a.value, a.value_adam);
  }
  return w.Take();
}

Checkpoint DeserializeCheckpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.Raw(4) != std::string(kMagic, 4)) throw CheckpointError("not a checkpoint file");
  const uint32_t version = r.U32();
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint c;
  c.config_hash = r.Str();
  c.episodes = r.I64();
  const uint32_t n = r.U32();
  c.agents.resize(n);
  for (auto& a : c.agents) {
    ReadNet(r, a.policy, a.policy_adam);
    ReadNet(r, a.value, a.value_adam);
  }
  if (!r.AtEnd()) throw CheckpointError("trailing bytes after checkpoint");
  return c;
}

void SaveCheckpoint(const Checkpoint& c, const std::filesystem::path& path) {
  const std::string bytes = SerializeCheckpoint(c);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return DeserializeCheckpoint(ss.str());
}

void CheckCompatible(const Checkpoint& c, int num_agents, const NetShape& ps,
                     const NetShape& vs) {
  if (static_cast<int>(c.agents.size()) != num_agents) {
    throw CheckpointError("checkpoint has " + std::to_string(c.agents.size()) +
                          " agents, config implies " + std::to_string(num_agents));
  }
  for (const auto& a : c.agents) {
    if (!(a.policy.shape == ps) || !(a.value.shape == vs)) {
      throw CheckpointError("checkpoint network shape does not match the config");
    }
  }
}

}  // namespace hexcell
