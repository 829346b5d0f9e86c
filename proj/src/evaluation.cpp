#include "igr/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <random>

#include "igr/baselines.hpp"
#include "igr/error.hpp"

namespace igr {

std::string method_name(Method m) {
  switch (m) {
    case Method::Ours: return "ours";
    case Method::NaiveIBR: return "nibr";
    case Method::PerTriangle: return "triangle";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "ours") return Method::Ours;
  if (name == "nibr") return Method::NaiveIBR;
  if (name == "triangle") return Method::PerTriangle;
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + name + "' (expected ours, nibr or triangle)");
}

double EvalReport::aggregate() const {
  if (rows.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rows) s += r.mse;
  return s / static_cast<double>(rows.size());
}

EvalReport evaluate(const SessionState& session, const Dataset& test, Method method) {
  EvalReport report;
  report.method = method_name(method);
  report.effects = session.effects.has_value();
  const double eps =
      session.config.occlusion_eps > 0.0 ? session.config.occlusion_eps : 0.01 * session.bounds.sphere_radius();
  for (const auto& f : test.frames) {
    require(f.has_depth(), ErrorKind::InvalidArgument, "test frame " + std::to_string(f.id) + " has no depth");
    const ViewTarget target{f.camera, f.depth};
    Image predicted;
    switch (method) {
      case Method::Ours: predicted = render_view(session, f.camera, f.depth); break;
      case Method::NaiveIBR:
        predicted = naive_ibr(target, session.references.original, session.config.views, eps);
        break;
      case Method::PerTriangle:
        predicted = per_triangle_ibr(target, session.references.original, session.mesh, eps);
        break;
    }
    report.rows.push_back({f.id, report.method, mse_eval(predicted, f.image)});
  }
  return report;
}

void write_report_csv(const std::vector<EvalReport>& reports, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::Io, "cannot write " + path.string());
  out.precision(10);
  out << "frame_id,method,mse\n";
  for (const auto& r : reports)
    for (const auto& row : r.rows) out << row.frame_id << ',' << row.method << ',' << row.mse << '\n';
}

void write_summary_csv(const std::vector<EvalReport>& reports, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::Io, "cannot write " + path.string());
  out.precision(10);
  out << "method,train_fraction,effects,mse\n";
  for (const auto& r : reports)
    out << r.method << ',' << r.train_fraction << ',' << (r.effects ? 1 : 0) << ',' << r.aggregate() << '\n';
}

Dataset training_subset(const Dataset& training, double fraction, std::uint64_t seed, int minimum) {
  require(fraction > 0.0 && fraction <= 1.0, ErrorKind::InvalidArgument, "training fraction must be in (0, 1]");
  const int n = static_cast<int>(training.frames.size());
  const int keep = std::clamp(static_cast<int>(std::lround(fraction * n)), std::min(minimum, n), n);
  std::vector<int> ids = training.ids();
  std::mt19937_64 rng(seed);
  for (int i = n - 1; i > 0; --i) std::swap(ids[static_cast<std::size_t>(i)], ids[rng() % (i + 1)]);
  ids.resize(static_cast<std::size_t>(keep));
  return subset(training, ids);
}

std::vector<EvalReport> run_ablation(const Dataset& training, const Dataset& test, const AblationConfig& config) {
  std::vector<EvalReport> reports;
  std::map<double, EffectsModel> effects_cache;
  for (const auto& cell : config.cells) {
    const Dataset train = training_subset(training, cell.train_fraction, config.subset_seed,
                                          config.pipeline.reference_count);
    if (config.verbose)
      std::cerr << "ablation cell: fraction " << cell.train_fraction << " (" << train.frames.size()
                << " frames), effects " << (cell.effects ? "on" : "off") << '\n';
    std::optional<EffectsModel> effects;
    if (cell.effects) {
      auto it = effects_cache.find(cell.train_fraction);
      if (it == effects_cache.end()) {
        EffectsTrainOptions eo;
        eo.verbose = config.verbose;
        it = effects_cache.emplace(cell.train_fraction, train_effects(train, config.effects_config, eo).model).first;
      }
      effects = it->second;
    }
    PipelineTrainOptions po;
    po.pipeline = config.pipeline;
    po.composition.verbose = config.verbose;
    CompositionTrainResult comp =
        train_composition(train, effects ? &*effects : nullptr, config.composition_config, po);
    const SessionState session = make_session(train, effects, std::move(comp.model), config.pipeline);
    EvalReport r = evaluate(session, test, Method::Ours);
    r.train_fraction = cell.train_fraction;
    r.effects = cell.effects;
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace igr
