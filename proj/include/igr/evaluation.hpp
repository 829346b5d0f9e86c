#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "igr/pipeline.hpp"

namespace igr {

enum class Method { Ours, NaiveIBR, PerTriangle };

std::string method_name(Method m);   // "ours", "nibr", "triangle"
Method parse_method(const std::string& name);

struct EvalRow {
  int frame_id = 0;
  std::string method;
  double mse = 0.0;
};

struct EvalReport {
  std::string method;
  double train_fraction = 1.0;
  bool effects = true;
  std::vector<EvalRow> rows;

  double aggregate() const;  // mean of the per-frame values
};

/// Renders every test frame with the chosen method and scores it with mse_eval against the ground truth.
/// The baselines draw on the session's reference originals, so all methods see the same references and
/// the same nearest-view selection.
EvalReport evaluate(const SessionState& session, const Dataset& test, Method method);

/// CSV with columns frame_id, method, mse (one row per frame of every report).
void write_report_csv(const std::vector<EvalReport>& reports, const std::filesystem::path& path);

/// One row per report: method, train_fraction, effects, mse.
void write_summary_csv(const std::vector<EvalReport>& reports, const std::filesystem::path& path);

struct AblationCell {
  double train_fraction = 1.0;
  bool effects = true;
};

struct AblationConfig {
  std::vector<AblationCell> cells;
  TrainConfig effects_config;
  TrainConfig composition_config;
  PipelineConfig pipeline;
  std::uint64_t subset_seed = 7;
  bool verbose = false;
};

/// Training frames kept for a fraction: a seeded choice of round(fraction * N) frames (at least the
/// reference count), nested across fractions so smaller subsets are contained in larger ones.
Dataset training_subset(const Dataset& training, double fraction, std::uint64_t seed, int minimum);

/// Trains each cell (effects models are shared between cells of equal fraction) and evaluates the
/// pipeline on the fixed test set.
std::vector<EvalReport> run_ablation(const Dataset& training, const Dataset& test, const AblationConfig& config);

}  // namespace igr
