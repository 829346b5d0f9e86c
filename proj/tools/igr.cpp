// Command-line front end: dataset preparation, training, evaluation, rendering and the render service.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"

#include "igr/dataset.hpp"
#include "igr/error.hpp"
#include "igr/evaluation.hpp"
#include "igr/image_io.hpp"
#include "igr/pipeline.hpp"
#include "igr/server.hpp"
#include "igr/synthetic.hpp"
#include "igr/view_selection.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TrainFlags {
  igr::TrainConfig config;
  std::string net;
  std::string data;
  std::string out;
  std::string effects;
  std::string resume;
  std::string loss_csv;
  bool no_effects = false;
  bool reselect = false;
  int views = 4;
  int references = 20;
};

void add_train_config(CLI::App* cmd, igr::TrainConfig& c) {
  cmd->add_option("--lr", c.learning_rate, "Adam learning rate")->capture_default_str();
  cmd->add_option("--beta1", c.beta1)->capture_default_str();
  cmd->add_option("--beta2", c.beta2)->capture_default_str();
  cmd->add_option("--epsilon", c.epsilon)->capture_default_str();
  cmd->add_option("--epochs", c.epochs)->capture_default_str();
  cmd->add_option("--batch-size", c.batch_size)->capture_default_str();
  cmd->add_option("--seed", c.seed)->capture_default_str();
  cmd->add_option("--adv-weight", c.adversarial_weight)->capture_default_str();
  cmd->add_option("--l1-weight", c.l1_weight)->capture_default_str();
  cmd->add_option("--reg-weight", c.effects_reg_weight, "effects regularizer weight")->capture_default_str();
  cmd->add_option("--steps-per-epoch", c.steps_per_epoch, "0 = one pass per epoch")->capture_default_str();
}

igr::Dataset load_prepared(const fs::path& root) {
  igr::Dataset d = igr::load_dataset(root);
  igr::rasterize_missing_depth(d);
  igr::validate_dataset(d);
  return d;
}

// Training and test halves recorded by `prepare`; all frames train when no split file exists.
std::pair<igr::Dataset, igr::Dataset> prepared_split(const igr::Dataset& d, const fs::path& root) {
  if (!fs::exists(root / "split.json")) return {d, igr::Dataset{}};
  const igr::Split s = igr::read_split(root / "split.json");
  return {igr::subset(d, s.train), igr::subset(d, s.test)};
}

void write_references(const igr::Dataset& train, int count, const fs::path& root) {
  const int n = std::min<int>(count, static_cast<int>(train.frames.size()));
  const auto ids = igr::select_reference_views(train, n, igr::default_occlusion_eps(train.mesh));
  igr::write_ids(ids, root / "references.json");
}

int run_prepare(const std::string& synthetic, const std::string& ingest, const std::string& out_root,
                double test_fraction, std::uint64_t seed, int reference_count) {
  if (!synthetic.empty()) {
    if (out_root.empty()) throw igr::Error(igr::ErrorKind::InvalidArgument, "--out is required with --synthetic");
    const igr::SceneFile scene = igr::read_scene_file(synthetic);
    const igr::Dataset d = igr::render_synthetic(scene.scene, scene.height, scene.width);
    igr::store_dataset(d, out_root);
    const auto [train, test] = igr::split_train_test(d, scene.test_fraction, scene.split_seed);
    igr::write_split({train.ids(), test.ids()}, fs::path(out_root) / "split.json");
    write_references(train, scene.reference_count, fs::path(out_root));
    std::cout << "wrote " << d.frames.size() << " frames (" << train.frames.size() << " train, "
              << test.frames.size() << " test) to " << out_root << '\n';
    return 0;
  }
  igr::Dataset d = igr::load_dataset(ingest);
  std::size_t missing = 0;
  for (const auto& f : d.frames) missing += !f.has_depth();
  igr::rasterize_missing_depth(d);
  igr::validate_dataset(d);
  const fs::path root = out_root.empty() ? fs::path(ingest) : fs::path(out_root);
  if (root != fs::path(ingest)) {
    igr::store_dataset(d, root);
  } else {
    fs::create_directories(root / "depth");
    for (const auto& f : d.frames) {
      char name[32];
      std::snprintf(name, sizeof(name), "%06d.pfm", f.id);
      igr::write_pfm(f.depth, root / "depth" / name);
    }
  }
  if (!fs::exists(root / "split.json")) {
    const auto [train, test] = igr::split_train_test(d, test_fraction, seed);
    igr::write_split({train.ids(), test.ids()}, root / "split.json");
  }
  write_references(prepared_split(d, root).first, reference_count, root);
  std::cout << "ingested " << d.frames.size() << " frames, rasterized " << missing << " depth maps\n";
  return 0;
}

int run_train(TrainFlags& f) {
  const igr::Dataset all = load_prepared(f.data);
  const igr::Dataset train = prepared_split(all, f.data).first;
  igr::LossHistory history;
  if (f.net == "effects") {
    igr::EffectsTrainOptions o;
    o.checkpoint = f.out;
    if (!f.resume.empty()) o.resume = f.resume;
    o.verbose = true;
    history = igr::train_effects(train, f.config, o).history;
  } else {
    std::optional<igr::EffectsModel> effects;
    if (!f.no_effects) {
      if (f.effects.empty())
        throw igr::Error(igr::ErrorKind::InvalidArgument, "--effects is required unless --no-effects is set");
      effects = igr::EffectsModel::load(f.effects);
    }
    igr::PipelineTrainOptions o;
    o.pipeline.views = f.views;
    o.pipeline.reference_count = f.references;
    if (fs::exists(fs::path(f.data) / "references.json") && !f.reselect)
      o.reference_ids = igr::read_ids(fs::path(f.data) / "references.json");
    o.composition.checkpoint = f.out;
    if (!f.resume.empty()) o.composition.resume = f.resume;
    o.composition.verbose = true;
    history = igr::train_composition(train, effects ? &*effects : nullptr, f.config, o).history;
  }
  if (!f.loss_csv.empty()) history.write_csv(f.loss_csv);
  std::cout << "checkpoint written to " << f.out << '\n';
  return 0;
}

int run_evaluate(const std::string& data, const std::string& ckpt, const std::string& effects,
                 const std::string& method, const std::string& out) {
  const igr::Method m = igr::parse_method(method);
  const igr::SessionState session = igr::load_session(data, effects, ckpt);
  const igr::Dataset all = load_prepared(data);
  igr::Dataset test = prepared_split(all, data).second;
  if (test.frames.empty()) test = all;
  const igr::EvalReport report = igr::evaluate(session, test, m);
  igr::write_report_csv({report}, out);
  std::cout << method << " mean MSE over " << report.rows.size() << " frames: " << report.aggregate() << '\n';
  return 0;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw igr::Error(igr::ErrorKind::MissingFile, "cannot open " + path.string());
  return json::parse(in);
}

int run_render(const std::string& data, const std::string& effects, const std::string& composition,
               const std::string& pose, const std::string& out, const std::string& debug_dir) {
  const igr::SessionState session = igr::load_session(data, effects, composition);
  igr::RenderRequest req = igr::parse_render_request(read_json_file(pose));
  req.debug = !debug_dir.empty();
  const igr::RenderOutput r = igr::render_novel_view(session, req);
  igr::write_png(r.image, out);
  if (r.out_of_bounds) std::cerr << "warning: the proxy mesh is not visible from this pose\n";
  if (r.debug) {
    const fs::path dir(debug_dir);
    fs::create_directories(dir);
    const igr::TargetPreparation& t = *r.debug;
    for (std::size_t k = 0; k < t.warps.size(); ++k) {
      const std::string s = std::to_string(k);
      igr::write_png(igr::clamp01(t.warps[k].color), dir / ("warp_" + s + ".png"));
      igr::write_png(igr::clamp01(t.diffuse_warps[k].color), dir / ("diffuse_warp_" + s + ".png"));
      igr::Image mask(t.warps[k].mask.height, t.warps[k].mask.width, 1);
      for (std::size_t i = 0; i < mask.data.size(); ++i) mask.data[i] = t.warps[k].mask.data[i] ? 1.0f : 0.0f;
      igr::write_png(mask, dir / ("mask_" + s + ".png"));
    }
    if (!t.effects.empty()) igr::write_png(t.effects, dir / "effects.png");
    json meta = {{"camera", igr::camera_to_json(igr::request_camera(session, req), -1)},
                 {"selected_ids", t.selection.ids},
                 {"gains", t.selection.gains}};
    std::ofstream(dir / "meta.json") << meta.dump(1) << '\n';
  }
  return 0;
}

int run_serve(const std::string& data, const std::string& effects, const std::string& composition, int port,
              const std::string& address, const std::string& viewer) {
  auto session = std::make_shared<const igr::SessionState>(igr::load_session(data, effects, composition));
  igr::ServerOptions o;
  o.port = port;
  o.address = address;
  if (!viewer.empty()) o.viewer_root = viewer;
  igr::RenderServer server(session, o);
  server.start();
  std::cout << "serving " << session->name << " on http://" << address << ':' << server.port() << std::endl;
  server.wait();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural image-guided rendering: prepare, train, evaluate, render, serve"};
  app.require_subcommand(1);

  std::string synthetic, ingest, out_root;
  double test_fraction = 1.0 / 6.0;
  std::uint64_t split_seed = 7;
  int reference_count = 20;
  auto* prepare = app.add_subcommand("prepare", "Render a synthetic dataset or ingest a reconstructed one");
  auto* syn_opt = prepare->add_option("--synthetic", synthetic, "scene description JSON");
  prepare->add_option("--ingest", ingest, "dataset root to ingest")->excludes(syn_opt);
  prepare->add_option("--out", out_root, "output dataset root");
  prepare->add_option("--test-fraction", test_fraction, "held-out fraction for ingested data")->capture_default_str();
  prepare->add_option("--split-seed", split_seed)->capture_default_str();
  prepare->add_option("--references", reference_count, "reference views for ingested data")->capture_default_str();

  TrainFlags tf;
  auto* train = app.add_subcommand("train", "Train the effects or the composition network");
  train->add_option("--net", tf.net)->required()->check(CLI::IsMember({"effects", "composition"}));
  train->add_option("--data", tf.data)->required();
  train->add_option("--out", tf.out, "checkpoint path (rewritten every epoch)")->required();
  train->add_option("--effects", tf.effects, "effects checkpoint (composition only)");
  train->add_flag("--no-effects", tf.no_effects, "train composition without effects removal");
  train->add_option("--resume", tf.resume, "checkpoint to resume from");
  train->add_option("--loss-csv", tf.loss_csv, "write the loss history as CSV");
  train->add_option("--views", tf.views, "nearest views per target")->capture_default_str();
  train->add_option("--references", tf.references, "reference view count")->capture_default_str();
  train->add_flag("--reselect", tf.reselect, "ignore references.json and select reference views again");
  add_train_config(train, tf.config);

  std::string data, ckpt, effects, method, out, composition, pose, debug_dir, address = "127.0.0.1", viewer;
  int port = 8080;
  auto* evaluate = app.add_subcommand("evaluate", "Score a method on the held-out frames");
  evaluate->add_option("--data", data)->required();
  evaluate->add_option("--ckpt", ckpt, "composition checkpoint")->required();
  evaluate->add_option("--effects", effects, "effects checkpoint");
  evaluate->add_option("--method", method)->required()->check(CLI::IsMember({"ours", "nibr", "triangle"}));
  evaluate->add_option("--out", out, "report CSV")->required();

  auto* render = app.add_subcommand("render", "Synthesize one novel view");
  render->add_option("--data", data)->required();
  render->add_option("--effects", effects);
  render->add_option("--composition", composition)->required();
  render->add_option("--pose", pose, "pose JSON (orbit or camera)")->required();
  render->add_option("--out", out)->required();
  render->add_option("--debug-layers", debug_dir, "directory for warps, masks and effects");

  auto* serve = app.add_subcommand("serve", "Run the HTTP/WebSocket render service");
  serve->add_option("--data", data)->required();
  serve->add_option("--effects", effects);
  serve->add_option("--composition", composition)->required();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--address", address)->capture_default_str();
  serve->add_option("--viewer", viewer, "static viewer asset directory");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*prepare) {
      if (synthetic.empty() == ingest.empty())
        throw igr::Error(igr::ErrorKind::InvalidArgument, "prepare needs exactly one of --synthetic or --ingest");
      return run_prepare(synthetic, ingest, out_root, test_fraction, split_seed, reference_count);
    }
    if (*train) {
      tf.config.validate();
      return run_train(tf);
    }
    if (*evaluate) return run_evaluate(data, ckpt, effects, method, out);
    if (*render) return run_render(data, effects, composition, pose, out, debug_dir);
    if (*serve) return run_serve(data, effects, composition, port, address, viewer);
  } catch (const igr::Error& e) {
    std::cerr << "error (" << igr::to_string(e.kind()) << "): " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
