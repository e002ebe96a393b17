#include "gpgrade/model_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gpgrade/atomic_file.hpp"
#include "gpgrade/error.hpp"

namespace gpgrade {

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  auto bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

constexpr std::size_t kHeaderSize = 32;

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const char* p, std::size_t n) { buf_.append(p, n); }
  std::string& str() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(const char* p, std::size_t n) : p_(p), n_(n) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(p_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(p_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t remaining() const { return n_ - pos_; }

 private:
  void need(std::size_t k) const {
    if (n_ - pos_ < k) throw LoadError(LoadError::Kind::Truncated, "model archive: truncated payload");
  }
  const char* p_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

struct Fingerprint {
  double chol_frobenius;
  double alpha_norm;
  double alpha_sum;
};

Fingerprint fingerprint(const GPModel& m) {
  return {m.chol_lower().norm(), m.alpha().norm(), m.alpha().sum()};
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)); }

}  // namespace

std::string serialize_model(const GPModel& model) {
  Writer payload;
  const Hyperparams& hp = model.hyperparams();
  payload.f64(hp.log_length_scale);
  payload.f64(hp.log_signal_variance);
  payload.f64(hp.log_noise_variance);
  payload.u64(model.train_subset_seed());
  payload.u64(model.subsampled() ? 1 : 0);

  const auto n = static_cast<std::uint64_t>(model.n_train());
  const auto d = static_cast<std::uint64_t>(model.dimension());
  payload.u64(n);
  payload.u64(d);

  const NormStats& norm = model.normalizer();
  payload.u64(static_cast<std::uint64_t>(norm.dimension()));
  for (Eigen::Index k = 0; k < norm.dimension(); ++k) payload.f64(norm.mean[k]);
  for (Eigen::Index k = 0; k < norm.dimension(); ++k) payload.f64(norm.std[k]);

  const Matrix& x = model.x_train();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index k = 0; k < x.cols(); ++k) payload.f64(x(i, k));
  }
  for (Eigen::Index i = 0; i < model.y_train().size(); ++i) payload.f64(model.y_train()[i]);

  const Fingerprint fp = fingerprint(model);
  payload.f64(model.jitter());
  payload.f64(fp.chol_frobenius);
  payload.f64(fp.alpha_norm);
  payload.f64(fp.alpha_sum);

  const std::string& body = payload.str();
  Writer out;
  out.raw(kModelMagic, sizeof kModelMagic);
  out.u32(kModelFormatVersion);
  out.u32(0);
  out.u64(body.size());
  out.u64(fnv1a64(body.data(), body.size()));
  out.raw(body.data(), body.size());
  return std::move(out.str());
}

GPModel deserialize_model(const std::string& bytes) {
  using Kind = LoadError::Kind;
  if (bytes.size() < kHeaderSize) throw LoadError(Kind::Truncated, "model archive: truncated header");
  if (std::memcmp(bytes.data(), kModelMagic, sizeof kModelMagic) != 0) {
    throw LoadError(Kind::BadMagic, "model archive: bad magic");
  }
  Reader header(bytes.data() + sizeof kModelMagic, kHeaderSize - sizeof kModelMagic);
  const std::uint32_t version = header.u32();
  if (version != kModelFormatVersion) {
    throw LoadError(Kind::Version, "model archive: unsupported format version " +
                                       std::to_string(version) + " (expected " +
                                       std::to_string(kModelFormatVersion) + ")");
  }
  header.u32();
  const std::uint64_t length = header.u64();
  const std::uint64_t checksum = header.u64();
  if (bytes.size() - kHeaderSize < length) {
    throw LoadError(Kind::Truncated, "model archive: payload shorter than declared");
  }
  if (bytes.size() - kHeaderSize > length) {
    throw LoadError(Kind::Corrupt, "model archive: trailing bytes after payload");
  }
  const char* body = bytes.data() + kHeaderSize;
  if (fnv1a64(body, length) != checksum) {
    throw LoadError(Kind::Checksum, "model archive: checksum mismatch");
  }

  Reader r(body, length);
  Hyperparams hp;
  hp.log_length_scale = r.f64();
  hp.log_signal_variance = r.f64();
  hp.log_noise_variance = r.f64();
  const std::uint64_t seed = r.u64();
  const bool subsampled = r.u64() != 0;
  const std::uint64_t n = r.u64();
  const std::uint64_t d = r.u64();
  const std::uint64_t norm_dim = r.u64();
  const std::uint64_t words = r.remaining() / 8;
  if (n < 2 || d < 1 || n > words || d > words || n * d > words ||
      (norm_dim != 0 && norm_dim != d) ||
      (n * d + n + 2 * norm_dim + 4) * 8 != r.remaining()) {
    throw LoadError(Kind::Corrupt, "model archive: inconsistent dimensions");
  }

  NormStats norm;
  norm.mean.resize(static_cast<Eigen::Index>(norm_dim));
  norm.std.resize(static_cast<Eigen::Index>(norm_dim));
  for (auto& v : norm.mean) v = r.f64();
  for (auto& v : norm.std) v = r.f64();

  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index k = 0; k < x.cols(); ++k) x(i, k) = r.f64();
  }
  Vector y(static_cast<Eigen::Index>(n));
  for (auto& v : y) v = r.f64();

  const double jitter = r.f64();
  const Fingerprint saved{r.f64(), r.f64(), r.f64()};

  GPModel model;
  try {
    model = GPModel::condition(std::move(x), std::move(y), hp, std::move(norm), seed, subsampled);
  } catch (const Error& e) {
    throw LoadError(Kind::Corrupt, std::string("model archive: cannot refactorize: ") + e.what());
  }
  const Fingerprint now = fingerprint(model);
  if (!close(saved.chol_frobenius, now.chol_frobenius) || !close(saved.alpha_norm, now.alpha_norm) ||
      !close(saved.alpha_sum, now.alpha_sum) || !close(jitter, model.jitter())) {
    throw LoadError(Kind::Checksum, "model archive: recomputed factorization does not match");
  }
  return model;
}

void save_model(const GPModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_model(model));
}

GPModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw LoadError(LoadError::Kind::Io, "cannot open model " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return deserialize_model(ss.str());
}

}  // namespace gpgrade
