#include "gpgrade/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>

#include "gpgrade/atomic_file.hpp"
#include "gpgrade/error.hpp"

namespace gpgrade {

void validate_grade(int grade) {
  if (grade < 0 || grade >= kNumGrades) {
    throw InputError("grade " + std::to_string(grade) + " outside 0..4");
  }
}

std::array<std::size_t, kNumGrades> grade_histogram(std::span<const FeatureRecord> records) {
  std::array<std::size_t, kNumGrades> h{};
  for (const FeatureRecord& r : records) {
    validate_grade(r.grade);
    ++h[static_cast<std::size_t>(r.grade)];
  }
  return h;
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename T>
bool parse_whole(std::string_view field, T& value) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last && first != last;
}

}  // namespace

Dataset parse_feature_csv(const std::string& text, const std::string& source) {
  Dataset ds;
  ds.manifest.path = source;

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  bool have_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string_view> fields = split_commas(line);

    if (!have_header) {
      if (fields.size() < 3 || fields[0] != "id" || fields[1] != "grade") {
        throw ParseError("malformed header, expected id,grade,f0,...", line_no);
      }
      for (std::size_t k = 2; k < fields.size(); ++k) {
        if (fields[k] != "f" + std::to_string(k - 2)) {
          throw ParseError("malformed header column '" + std::string(fields[k]) + "'", line_no);
        }
      }
      dim = fields.size() - 2;
      have_header = true;
      continue;
    }

    if (fields.size() != dim + 2) {
      throw ParseError("expected " + std::to_string(dim + 2) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    FeatureRecord rec;
    if (fields[0].empty()) throw ParseError("empty id", line_no);
    rec.id = std::string(fields[0]);
    if (!parse_whole(fields[1], rec.grade)) {
      throw ParseError("grade '" + std::string(fields[1]) + "' is not an integer", line_no);
    }
    if (rec.grade < 0 || rec.grade >= kNumGrades) {
      throw ParseError("grade " + std::to_string(rec.grade) + " outside 0..4", line_no);
    }
    rec.features.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      double v = 0.0;
      if (!parse_whole(fields[k + 2], v) || !std::isfinite(v)) {
        throw ParseError("feature f" + std::to_string(k) + " is not a finite real", line_no);
      }
      rec.features[k] = v;
    }
    ++ds.manifest.grade_histogram[static_cast<std::size_t>(rec.grade)];
    ds.records.push_back(std::move(rec));
  }

  if (!have_header) throw ParseError("missing header", 0);
  if (ds.records.empty()) throw ParseError("no records", 0);
  ds.manifest.n_records = ds.records.size();
  ds.manifest.dimension = dim;
  return ds;
}

Dataset load_feature_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open feature file " + path.string(), 0);
  std::ostringstream ss;
  ss << is.rdbuf();
  try {
    return parse_feature_csv(ss.str(), path.string());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

namespace {

void append_real(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

std::string format_feature_csv(std::span<const FeatureRecord> records) {
  if (records.empty()) throw InputError("format_feature_csv: no records");
  const std::size_t dim = records.front().features.size();
  std::string out = "id,grade";
  for (std::size_t k = 0; k < dim; ++k) out += ",f" + std::to_string(k);
  out += '\n';
  for (const FeatureRecord& r : records) {
    if (r.features.size() != dim) throw InputError("format_feature_csv: ragged records");
    if (r.id.find_first_of(",\n\r") != std::string::npos) {
      throw InputError("format_feature_csv: id '" + r.id + "' contains a separator");
    }
    validate_grade(r.grade);
    out += r.id;
    out += ',';
    out += std::to_string(r.grade);
    for (double v : r.features) {
      out += ',';
      append_real(out, v);
    }
    out += '\n';
  }
  return out;
}

void save_feature_csv(const std::filesystem::path& path, std::span<const FeatureRecord> records) {
  write_file_atomic(path, format_feature_csv(records));
}

Matrix feature_matrix(std::span<const FeatureRecord> records) {
  if (records.empty()) return Matrix(0, 0);
  const std::size_t dim = records.front().features.size();
  Matrix m(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].features.size() != dim) {
      throw InputError("record " + records[i].id + " has dimension " +
                       std::to_string(records[i].features.size()) + ", expected " +
                       std::to_string(dim));
    }
    m.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(records[i].features.data(),
                                             static_cast<Eigen::Index>(dim));
  }
  return m;
}

Vector grade_vector(std::span<const FeatureRecord> records) {
  Vector y(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    validate_grade(records[i].grade);
    y[static_cast<Eigen::Index>(i)] = records[i].grade;
  }
  return y;
}

NormStats fit_normalizer(const Matrix& features) {
  if (features.rows() == 0) throw InputError("fit_normalizer: empty training set");
  const double n = static_cast<double>(features.rows());
  NormStats s;
  s.mean = features.colwise().mean().transpose();
  s.std = ((features.rowwise() - s.mean.transpose()).array().square().colwise().sum() / n)
              .sqrt()
              .transpose();
  s.std = s.std.cwiseMax(NormStats::kStdFloor);
  return s;
}

NormStats fit_normalizer(std::span<const FeatureRecord> train) {
  return fit_normalizer(feature_matrix(train));
}

Matrix apply_normalizer(const NormStats& stats, const Matrix& features) {
  if (features.cols() != stats.dimension()) {
    throw InputError("normalizer dimension " + std::to_string(stats.dimension()) +
                     " does not match features of dimension " + std::to_string(features.cols()));
  }
  Matrix out = features.rowwise() - stats.mean.transpose();
  out.array().rowwise() /= stats.std.transpose().array();
  return out;
}

Matrix apply_normalizer(const NormStats& stats, std::span<const FeatureRecord> records) {
  return apply_normalizer(stats, feature_matrix(records));
}

Matrix invert_normalizer(const NormStats& stats, const Matrix& normalized) {
  if (normalized.cols() != stats.dimension()) throw InputError("normalizer dimension mismatch");
  Matrix out = normalized;
  out.array().rowwise() *= stats.std.transpose().array();
  out.rowwise() += stats.mean.transpose();
  return out;
}

Vector synth_direction(std::uint64_t seed, int dimension) {
  if (dimension < 2) throw InputError("synthesize: dimension must be >= 2");
  std::mt19937_64 rng(seed ^ 0xa5a5a5a5deadbeefULL);
  std::normal_distribution<double> normal;
  Vector u(dimension);
  do {
    for (int k = 0; k < dimension; ++k) u[k] = normal(rng);
  } while (u.norm() == 0.0);
  return u / u.norm();
}

std::vector<FeatureRecord> synthesize_dataset(const SynthParams& p) {
  if (p.dimension < 2) throw InputError("synthesize: dimension must be >= 2");
  if (!(p.separation > 0.0) || !std::isfinite(p.separation)) {
    throw InputError("synthesize: separation must be > 0");
  }
  if (!(p.noise > 0.0) || !std::isfinite(p.noise)) throw InputError("synthesize: noise must be > 0");
  for (int c : p.n_per_grade) {
    if (c < 0) throw InputError("synthesize: negative per-grade count");
  }

  const Vector u = synth_direction(p.seed, p.dimension);
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> normal;

  std::vector<FeatureRecord> out;
  out.reserve(static_cast<std::size_t>(std::accumulate(p.n_per_grade.begin(), p.n_per_grade.end(), 0)));
  for (int g = 0; g < kNumGrades; ++g) {
    const Vector center = (g * p.separation) * u;
    for (int k = 0; k < p.n_per_grade[static_cast<std::size_t>(g)]; ++k) {
      FeatureRecord r;
      r.id = "s" + std::to_string(g) + "_" + std::to_string(k);
      r.grade = g;
      r.features.resize(static_cast<std::size_t>(p.dimension));
      for (int d = 0; d < p.dimension; ++d) {
        r.features[static_cast<std::size_t>(d)] = center[d] + p.noise * normal(rng);
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<std::size_t> corrupt_grades(std::vector<FeatureRecord>& records, double fraction,
                                        std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw InputError("label noise fraction must be in [0,1]");
  const std::size_t n = records.size();
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed ^ 0x5bd1e9955bd1e995ULL);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  std::uniform_int_distribution<int> other(1, kNumGrades - 1);
  for (std::size_t i : idx) {
    validate_grade(records[i].grade);
    records[i].grade = (records[i].grade + other(rng)) % kNumGrades;
  }
  return idx;
}

void split_dataset(std::span<const FeatureRecord> records, double test_fraction,
                   std::uint64_t seed, std::vector<FeatureRecord>& train,
                   std::vector<FeatureRecord>& test) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InputError("holdout fraction must be in (0,1)");
  }
  std::array<std::vector<std::size_t>, kNumGrades> by_grade;
  for (std::size_t i = 0; i < records.size(); ++i) {
    validate_grade(records[i].grade);
    by_grade[static_cast<std::size_t>(records[i].grade)].push_back(i);
  }
  std::vector<bool> in_test(records.size(), false);
  std::mt19937_64 rng(seed ^ 0x27d4eb2f165667c5ULL);
  for (auto& members : by_grade) {
    const auto k = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(members.size())));
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, members.size() - 1);
      std::swap(members[i], members[pick(rng)]);
      in_test[members[i]] = true;
    }
  }
  train.clear();
  test.clear();
  for (std::size_t i = 0; i < records.size(); ++i) {
    (in_test[i] ? test : train).push_back(records[i]);
  }
}

}  // namespace gpgrade
