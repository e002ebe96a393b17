// gpgrade: train / predict / evaluate / synth / sweep front end.

#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gpgrade/pipeline.hpp"

namespace {

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) grid.push_back(std::stod(item));
  return grid;
}

void add_common(CLI::App* cmd, gpgrade::RunConfig& c) {
  cmd->add_option("--grade-threshold", c.grade_threshold, "Referable cut on the posterior mean")
      ->capture_default_str();
  cmd->add_option("--std-threshold", c.std_threshold,
                  "Negatives with posterior std above this become positive")
      ->capture_default_str();
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  gpgrade::RunConfig c;
  std::string grid;
  std::string n_per_grade;
  std::string holdout;

  CLI::App app{"Gaussian-process grading of feature vectors with uncertainty-aware referral"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "Fit normalizer and GP, write a model archive");
  train->add_option("--train-csv", c.train_csv, "Training feature CSV")->required();
  train->add_option("--model", c.model, "Model archive to write")->required();
  train->add_option("--max-train", c.max_train, "Subsample size cap")->capture_default_str();
  train->add_option("--restarts", c.restarts, "Optimizer restarts")->capture_default_str();
  add_common(train, c);

  auto* predict = app.add_subcommand("predict", "Write id,mean,std,referable,flipped per sample");
  auto* evaluate = app.add_subcommand("evaluate", "Confusion, sensitivity/specificity, AUC, std box stats");
  auto* sweep = app.add_subcommand("sweep", "Sensitivity/specificity over a grid of std thresholds");
  for (auto* cmd : {predict, evaluate, sweep}) {
    cmd->add_option("--test-csv", c.test_csv, "Feature CSV to score")->required();
    cmd->add_option("--model", c.model, "Model archive")->required();
    cmd->add_option("--out", c.out, "Output path")->required();
    add_common(cmd, c);
  }
  sweep->add_option("--std-grid", grid, "Comma-separated std thresholds (default 0,0.1,...,2)");

  auto* synth = app.add_subcommand("synth", "Write a seeded synthetic feature CSV");
  synth->add_option("--out", c.out, "Output CSV (training side when --holdout-out is set)")
      ->required();
  synth->add_option("--n-per-grade", n_per_grade, "Five comma-separated counts")
      ->default_str("50,50,50,50,50");
  synth->add_option("--dim", c.synth.dimension, "Feature dimension")->capture_default_str();
  synth->add_option("--separation", c.synth.separation, "Distance between grade centers")
      ->capture_default_str();
  synth->add_option("--noise", c.synth.noise, "Per-coordinate noise std")->capture_default_str();
  synth->add_option("--label-noise", c.label_noise, "Fraction of grades to corrupt")
      ->capture_default_str();
  synth->add_option("--holdout-out", holdout, "Also write a stratified held-out split here");
  synth->add_option("--holdout-fraction", c.holdout_fraction, "Held-out share")
      ->capture_default_str();
  synth->add_option("--seed", c.synth.seed, "Generator seed")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (!grid.empty()) c.std_grid = parse_grid(grid);
    if (!n_per_grade.empty()) {
      const std::vector<double> counts = parse_grid(n_per_grade);
      if (counts.size() != 5) throw CLI::ValidationError("--n-per-grade", "needs 5 counts");
      for (std::size_t g = 0; g < 5; ++g) c.synth.n_per_grade[g] = static_cast<int>(counts[g]);
    }
    if (!holdout.empty()) c.holdout_out = holdout;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gpgrade::kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return gpgrade::kExitInputError;
  }

  if (train->parsed()) c.command = gpgrade::Command::Train;
  else if (predict->parsed()) c.command = gpgrade::Command::Predict;
  else if (evaluate->parsed()) c.command = gpgrade::Command::Evaluate;
  else if (synth->parsed()) c.command = gpgrade::Command::Synth;
  else c.command = gpgrade::Command::Sweep;

  return gpgrade::run(c, std::cout, std::cerr);
}
