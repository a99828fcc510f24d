#include "adcnet/model/checkpoint.hpp"

#include <bit>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iterator>

#include "adcnet/error.hpp"
#include "adcnet/hashing.hpp"

namespace adcnet::model {
namespace {

constexpr char kMagic[4] = {'A', 'D', 'C', 'N'};
constexpr std::size_t kHeaderSize = 12;

enum Tag : std::uint32_t {
  kConfig = 1,
  kLayout = 2,
  kScaler = 3,
  kWeights = 4,
  kHistory = 5,
  kInfo = 6,
  kMetrics = 7,
};

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  void matrix(const Eigen::MatrixXd& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
  }
  void section(std::uint32_t tag, const Writer& body) {
    u32(tag);
    u64(body.bytes_.size());
    bytes_.insert(bytes_.end(), body.bytes_.begin(), body.bytes_.end());
  }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}
  bool done() const { return pos_ == size_; }
  std::uint8_t u8() { return *take(1); }
  std::uint32_t u32() {
    const auto* p = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const auto* p = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint64_t n = u64();
    const auto* p = take(n);
    return std::string(reinterpret_cast<const char*>(p), n);
  }
  Eigen::MatrixXd matrix() {
    const std::uint64_t rows = u64();
    const std::uint64_t cols = u64();
    if (cols != 0 && rows > (size_ - pos_) / 8 / cols) fail();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = f64();
    return m;
  }
  Reader sub(std::uint64_t n) {
    const auto* p = take(n);
    return Reader(p, n);
  }

 private:
  [[noreturn]] static void fail() { throw Error(ErrorCode::FormatError, "checkpoint section is malformed"); }
  const std::uint8_t* take(std::uint64_t n) {
    if (n > size_ - pos_) fail();
    const auto* p = data_ + pos_;
    pos_ += n;
    return p;
  }
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

Eigen::VectorXd as_vector(const Eigen::MatrixXd& m) {
  if (m.cols() != 1) throw Error(ErrorCode::FormatError, "checkpoint bias is not a column");
  return m.col(0);
}

}  // namespace

bool Checkpoint::operator==(const Checkpoint& o) const {
  return model == o.model && config == o.config && ablated == o.ablated && layout == o.layout &&
         scaler == o.scaler && history == o.history && best_epoch == o.best_epoch &&
         model_name == o.model_name && trained_at == o.trained_at && metrics == o.metrics;
}

std::vector<std::uint8_t> serialize(const Checkpoint& c) {
  Writer payload;
  {
    Writer s;
    s.u64(c.config.max_epochs);
    s.u64(c.config.patience);
    s.f64(c.config.learning_rate);
    s.u64(c.config.batch_size);
    s.u64(c.config.hidden_dim);
    s.u64(c.config.seed);
    s.f64(c.config.l2_penalty);
    s.f64(c.config.leaky_slope);
    payload.section(kConfig, s);
  }
  {
    Writer s;
    s.u8(c.ablated.bits());
    s.u64(c.layout.size());
    for (const auto& slice : c.layout) {
      s.u8(static_cast<std::uint8_t>(slice.component));
      s.u64(slice.offset);
      s.u64(slice.dim);
    }
    payload.section(kLayout, s);
  }
  {
    Writer s;
    s.f64(c.scaler.mean);
    s.f64(c.scaler.std);
    s.f64(c.scaler.z_max);
    s.f64(c.scaler.train_min);
    s.f64(c.scaler.train_max);
    payload.section(kScaler, s);
  }
  {
    Writer s;
    s.f64(c.model.leaky_slope());
    s.matrix(c.model.hidden().weights);
    s.matrix(c.model.hidden().bias);
    s.matrix(c.model.output().weights);
    s.matrix(c.model.output().bias);
    payload.section(kWeights, s);
  }
  {
    Writer s;
    s.u64(c.best_epoch);
    s.u64(c.history.size());
    for (const auto& e : c.history) {
      s.u64(e.epoch);
      s.f64(e.train_loss);
      s.f64(e.val_auc);
      s.u8(e.improved ? 1 : 0);
    }
    payload.section(kHistory, s);
  }
  {
    Writer s;
    s.str(c.model_name);
    s.str(c.trained_at);
    payload.section(kInfo, s);
  }
  {
    Writer s;
    s.u64(c.metrics.size());
    for (const auto& [name, value] : c.metrics) {
      s.str(name);
      s.f64(value);
    }
    payload.section(kMetrics, s);
  }

  Writer out;
  for (char ch : kMagic) out.u8(static_cast<std::uint8_t>(ch));
  out.u32(kCheckpointFormatVersion);
  out.u32(crc32(payload.bytes()));
  auto bytes = std::move(out.bytes());
  bytes.insert(bytes.end(), payload.bytes().begin(), payload.bytes().end());
  return bytes;
}

Checkpoint deserialize(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::FormatError, "not an adcnet checkpoint (bad magic)");
  }
  if (bytes.size() < kHeaderSize) throw Error(ErrorCode::CorruptChecksum, "checkpoint header is truncated");
  Reader header(bytes.data() + 4, 8);
  const std::uint32_t version = header.u32();
  const std::uint32_t expected_crc = header.u32();
  if (version > kCheckpointFormatVersion || version == 0) {
    throw Error(ErrorCode::VersionMismatch, "checkpoint format " + std::to_string(version) +
                                                " is not supported (this build reads up to " +
                                                std::to_string(kCheckpointFormatVersion) + ")");
  }
  const std::span<const std::uint8_t> payload(bytes.data() + kHeaderSize, bytes.size() - kHeaderSize);
  if (crc32(payload) != expected_crc) {
    throw Error(ErrorCode::CorruptChecksum, "checkpoint payload checksum mismatch (truncated or altered)");
  }

  Checkpoint c;
  bool have_weights = false;
  Reader r(payload.data(), payload.size());
  while (!r.done()) {
    const std::uint32_t tag = r.u32();
    Reader s = r.sub(r.u64());
    switch (tag) {
      case kConfig:
        c.config.max_epochs = s.u64();
        c.config.patience = s.u64();
        c.config.learning_rate = s.f64();
        c.config.batch_size = s.u64();
        c.config.hidden_dim = s.u64();
        c.config.seed = s.u64();
        c.config.l2_penalty = s.f64();
        c.config.leaky_slope = s.f64();
        break;
      case kLayout: {
        const std::uint8_t bits = s.u8();
        for (auto comp : embedding::kAllComponents)
          if (bits & (1u << static_cast<int>(comp))) c.ablated.insert(comp);
        const std::uint64_t n = s.u64();
        for (std::uint64_t i = 0; i < n; ++i) {
          const std::uint8_t comp = s.u8();
          if (comp >= embedding::kAllComponents.size()) throw Error(ErrorCode::FormatError, "unknown component");
          const std::uint64_t offset = s.u64();
          const std::uint64_t dim = s.u64();
          c.layout.push_back({static_cast<embedding::Component>(comp), offset, dim});
        }
        break;
      }
      case kScaler:
        c.scaler.mean = s.f64();
        c.scaler.std = s.f64();
        c.scaler.z_max = s.f64();
        c.scaler.train_min = s.f64();
        c.scaler.train_max = s.f64();
        break;
      case kWeights: {
        const double slope = s.f64();
        Eigen::MatrixXd hw = s.matrix();
        Eigen::VectorXd hb = as_vector(s.matrix());
        Eigen::MatrixXd ow = s.matrix();
        Eigen::VectorXd ob = as_vector(s.matrix());
        c.model = MlpClassifier({std::move(hw), std::move(hb)}, {std::move(ow), std::move(ob)}, slope);
        have_weights = true;
        break;
      }
      case kHistory: {
        c.best_epoch = s.u64();
        const std::uint64_t n = s.u64();
        for (std::uint64_t i = 0; i < n; ++i) {
          EpochRecord e;
          e.epoch = s.u64();
          e.train_loss = s.f64();
          e.val_auc = s.f64();
          e.improved = s.u8() != 0;
          c.history.push_back(e);
        }
        break;
      }
      case kInfo:
        c.model_name = s.str();
        c.trained_at = s.str();
        break;
      case kMetrics: {
        const std::uint64_t n = s.u64();
        for (std::uint64_t i = 0; i < n; ++i) {
          std::string name = s.str();
          c.metrics[name] = s.f64();
        }
        break;
      }
      default:
        break;  // sections from compatible writers that this reader does not use
    }
  }
  if (!have_weights) throw Error(ErrorCode::FormatError, "checkpoint has no weights section");
  return c;
}

void save_checkpoint(const Checkpoint& c, const std::string& path) {
  const auto bytes = serialize(c);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write checkpoint " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "failed writing checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open checkpoint " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

std::string current_timestamp() {
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace adcnet::model
