#include "gpgrade/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "gpgrade/atomic_file.hpp"
#include "gpgrade/error.hpp"
#include "gpgrade/gp.hpp"
#include "gpgrade/metrics.hpp"
#include "gpgrade/model_io.hpp"
#include "gpgrade/report.hpp"

namespace gpgrade {

namespace {

void append_real(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

void require(const std::filesystem::path& p, const char* flag) {
  if (p.empty()) throw InputError(std::string("missing required flag ") + flag);
}

std::vector<int> grades_of(const std::vector<FeatureRecord>& records) {
  std::vector<int> g;
  g.reserve(records.size());
  for (const FeatureRecord& r : records) g.push_back(r.grade);
  return g;
}

struct Scored {
  std::vector<FeatureRecord> records;
  std::vector<Prediction> predictions;
};

Scored score_test_set(const RunConfig& c) {
  const GPModel model = load_model(c.model);
  if (model.normalizer().dimension() == 0) {
    throw InputError("model " + c.model.string() + " carries no feature normalizer");
  }
  Dataset test = load_feature_csv(c.test_csv);
  const Matrix x = apply_normalizer(model.normalizer(), test.records);
  return {std::move(test.records), predict(model, x)};
}

void run_train(const RunConfig& c, std::ostream& out) {
  const Dataset train = load_feature_csv(c.train_csv);
  const NormStats stats = fit_normalizer(train.records);
  const Matrix x = apply_normalizer(stats, train.records);
  const std::vector<int> grades = grades_of(train.records);

  FitConfig fc;
  fc.max_train = c.max_train;
  fc.restarts = c.restarts;
  fc.seed = c.seed;
  GPModel model = fit_grades(x, grades, fc);
  model.set_normalizer(stats);
  save_model(model, c.model);

  const Hyperparams& hp = model.hyperparams();
  std::string s;
  s += "records = " + std::to_string(train.manifest.n_records) + "\n";
  s += "dimension = " + std::to_string(train.manifest.dimension) + "\n";
  s += "n_train = " + std::to_string(model.n_train()) + (model.subsampled() ? " (subsampled)\n" : "\n");
  s += "lml = "; append_real(s, model.log_marginal_likelihood()); s += "\n";
  s += "length_scale = "; append_real(s, hp.length_scale()); s += "\n";
  s += "signal_variance = "; append_real(s, hp.signal_variance()); s += "\n";
  s += "noise_variance = "; append_real(s, hp.noise_variance()); s += "\n";
  s += "jitter = "; append_real(s, model.jitter()); s += "\n";
  out << s;
}

void run_predict(const RunConfig& c, std::ostream& out) {
  const Scored scored = score_test_set(c);
  const std::vector<Decision> decisions = decide(scored.predictions, c.grade_threshold, c.std_threshold);
  write_file_atomic(c.out, format_predictions_csv(scored.records, decisions));
  out << "predictions = " << decisions.size() << " -> " << c.out.string() << '\n';
}

void run_evaluate(const RunConfig& c, std::ostream& out) {
  const Scored scored = score_test_set(c);
  const std::vector<Decision> decisions = decide(scored.predictions, c.grade_threshold, c.std_threshold);
  const std::vector<bool> labels = referable_labels(grades_of(scored.records));
  const EvalReport report = evaluate(decisions, labels, c.grade_threshold, c.std_threshold);

  const std::string json = report_to_json(report);
  const std::string text = report_to_text(report);
  const std::string box = box_stats_table(report.group_stats);
  write_file_atomic(c.out, json);
  write_file_atomic(text_report_path(c.out), text);
  write_file_atomic(box_table_path(c.out), box);
  out << text;
}

void run_synth(const RunConfig& c, std::ostream& out) {
  std::vector<FeatureRecord> records = synthesize_dataset(c.synth);
  if (c.label_noise > 0.0) corrupt_grades(records, c.label_noise, c.synth.seed);
  if (c.holdout_out) {
    std::vector<FeatureRecord> train, test;
    split_dataset(records, c.holdout_fraction, c.synth.seed, train, test);
    const std::string train_csv = format_feature_csv(train);
    const std::string test_csv = format_feature_csv(test);
    write_file_atomic(c.out, train_csv);
    write_file_atomic(*c.holdout_out, test_csv);
    out << "train = " << train.size() << " -> " << c.out.string() << '\n'
        << "holdout = " << test.size() << " -> " << c.holdout_out->string() << '\n';
  } else {
    save_feature_csv(c.out, records);
    out << "records = " << records.size() << " -> " << c.out.string() << '\n';
  }
}

void run_sweep(const RunConfig& c, std::ostream& out) {
  const Scored scored = score_test_set(c);
  const std::vector<bool> labels = referable_labels(grades_of(scored.records));
  const std::vector<double> grid = c.std_grid.empty() ? default_std_grid() : c.std_grid;

  std::string csv = "std_threshold,tp,fp,tn,fn,sensitivity,specificity,flips\n";
  auto ratio = [&](const std::optional<double>& v) {
    if (v) append_real(csv, *v);
    else csv += "undefined";
  };
  for (double t : grid) {
    const std::vector<Decision> d = decide(scored.predictions, c.grade_threshold, t);
    const ConfusionCounts counts = confusion(d, labels);
    const SensSpec rates = sens_spec(counts);
    std::size_t flips = 0;
    for (const Decision& x : d) flips += x.flipped ? 1 : 0;
    append_real(csv, t);
    csv += ',' + std::to_string(counts.tp) + ',' + std::to_string(counts.fp) + ',' +
           std::to_string(counts.tn) + ',' + std::to_string(counts.fn) + ',';
    ratio(rates.sensitivity);
    csv += ',';
    ratio(rates.specificity);
    csv += ',' + std::to_string(flips) + '\n';
  }
  write_file_atomic(c.out, csv);
  out << csv;
}

}  // namespace

void RunConfig::validate() const {
  if (!std::isfinite(grade_threshold)) throw InputError("--grade-threshold must be finite");
  if (std::isnan(std_threshold)) throw InputError("--std-threshold must be a number");
  if (max_train < 2) throw InputError("--max-train must be >= 2");
  if (restarts < 1) throw InputError("--restarts must be >= 1");
  for (double t : std_grid) {
    if (std::isnan(t)) throw InputError("sweep grid contains NaN");
  }
  switch (command) {
    case Command::Train:
      require(train_csv, "--train-csv");
      require(model, "--model");
      break;
    case Command::Predict:
    case Command::Evaluate:
    case Command::Sweep:
      require(test_csv, "--test-csv");
      require(model, "--model");
      require(out, "--out");
      break;
    case Command::Synth:
      require(out, "--out");
      if (!(label_noise >= 0.0 && label_noise <= 1.0)) throw InputError("--label-noise must be in [0,1]");
      if (holdout_out && !(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
        throw InputError("--holdout-fraction must be in (0,1)");
      }
      break;
  }
}

std::vector<double> default_std_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 10.0);
  return grid;
}

std::filesystem::path text_report_path(const std::filesystem::path& json_path) {
  std::filesystem::path p = json_path;
  return p.replace_extension(".report.txt");
}

std::filesystem::path box_table_path(const std::filesystem::path& json_path) {
  std::filesystem::path p = json_path;
  return p.replace_extension(".boxstats.tsv");
}

std::string format_predictions_csv(const std::vector<FeatureRecord>& records,
                                   const std::vector<Decision>& decisions) {
  if (records.size() != decisions.size()) throw InputError("predictions: length mismatch");
  std::string s = "id,mean,std,referable,flipped\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    s += records[i].id;
    s += ',';
    append_real(s, decisions[i].mean);
    s += ',';
    append_real(s, decisions[i].std);
    s += decisions[i].referable ? ",1" : ",0";
    s += decisions[i].flipped ? ",1\n" : ",0\n";
  }
  return s;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    switch (config.command) {
      case Command::Train: run_train(config, out); break;
      case Command::Predict: run_predict(config, out); break;
      case Command::Evaluate: run_evaluate(config, out); break;
      case Command::Synth: run_synth(config, out); break;
      case Command::Sweep: run_sweep(config, out); break;
    }
    return kExitOk;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace gpgrade
