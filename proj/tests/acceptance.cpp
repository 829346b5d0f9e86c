// Desk-scale acceptance run: prints PASS or FAIL for each of the seven acceptance criteria and exits
// non-zero when any of them fails. Trained models and per-frame reports are written to --work.

#include <chrono>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "grad_check.hpp"
#include "igr/baselines.hpp"
#include "igr/checkpoint.hpp"
#include "igr/error.hpp"
#include "igr/evaluation.hpp"
#include "igr/image_io.hpp"
#include "igr/server.hpp"
#include "igr/synthetic.hpp"
#include "oracles.hpp"
#include "support.hpp"

// After the Eigen users: <resolv.h> defines a `_res` macro that clashes with Eigen parameter names.
#include "httplib.h"

using namespace igr;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Settings {
  fs::path work = "acceptance_work";
  int frames = 360;
  int resolution = 128;
  int effects_epochs = 10;
  int effects_steps = 100;
  int composition_epochs = 10;
  int composition_steps = 80;
  std::vector<int> only;
};

struct Result {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
  }
  void note(const std::string& what) { lines.push_back("      " + what); }
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream ss;
  ss << std::setprecision(precision) << v;
  return ss.str();
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void log(const std::string& s) { std::cerr << "[acceptance] " << s << std::endl; }

// ---------------------------------------------------------------------------------------------
// 1. Geometry

Result geometry_suite() {
  using test_support::identity_camera;
  using test_support::make_camera;
  using test_support::random_unit;
  Result r;

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uu(0.0, 128.0), dd(1.0, 6.0);
  int tested = 0;
  double worst = 0.0;
  while (tested < 10000) {
    const Camera p = make_camera(128, 128, 150.0, 4.0 * random_unit(rng), Eigen::Vector3d::Zero());
    const Camera q = make_camera(128, 128, 150.0, 4.0 * random_unit(rng), Eigen::Vector3d::Zero());
    for (int k = 0; k < 100 && tested < 10000; ++k) {
      const double u = uu(rng), v = uu(rng), d = dd(rng);
      const ScreenPoint s = cross_project_point(u, v, d, p, q);
      if (!s.in_front) continue;
      const ScreenPoint back = cross_project_point(s.u, s.v, s.depth, q, p);
      worst = std::max({worst, std::abs(back.u - u), std::abs(back.v - v), back.in_front ? 0.0 : 1e9});
      ++tested;
    }
  }
  r.check(worst < 1e-4, "cross-projection round trip over " + std::to_string(tested) +
                            " samples: worst error " + fmt(worst) + " px (limit 1e-4)");

  // The last ten scenes put a vertex behind the camera to exercise near-plane clipping.
  std::uniform_real_distribution<double> xy(-1.5, 1.5), z(1.0, 5.0), behind(-1.0, 0.8);
  int mismatches = 0, covered = 0;
  for (int scene = 0; scene < 60; ++scene) {
    const Camera cam = identity_camera(32, 32, 28.0, 16.0, 16.0);
    ProxyMesh mesh;
    for (int t = 0; t < 2; ++t) {
      for (int v = 0; v < 3; ++v) {
        const double zz = (scene >= 50 && v == 0) ? behind(rng) : z(rng);
        mesh.vertices.emplace_back(xy(rng) * zz * 0.5, xy(rng) * zz * 0.5, zz);
      }
      mesh.triangles.push_back({3 * t, 3 * t + 1, 3 * t + 2});
    }
    const RasterResult rr = rasterize(mesh, cam);
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x) {
        int tri = -1;
        const double expect = test_support::oracle_depth(mesh, cam, x, y, &tri);
        const double got = rr.depth.at(y, x);
        const bool same_cover = (got > 0) == (expect > 0);
        const bool same_depth = expect <= 0 || std::abs(got - expect) <= 1e-5 * expect;
        mismatches += !(same_cover && same_depth && rr.triangle_at(y, x) == tri);
        covered += expect > 0;
      }
  }
  r.check(mismatches == 0, "rasterizer vs ray oracle on 60 random 32x32 two-triangle scenes: " +
                               std::to_string(mismatches) + " mismatching pixels of " + std::to_string(covered) +
                               " covered");

  const test_support::VisibilityAgreement a = test_support::two_plane_agreement(256);
  const double frac = static_cast<double>(a.agree) / a.total;
  r.check(frac >= 0.99 && a.off_edge == 0,
          "two-plane warp masks vs brute-force visibility at 256x256: agreement " + fmt(100 * frac) + "%, " +
              std::to_string(a.off_edge) + " disagreements away from depth edges, " + std::to_string(a.hidden) +
              " occluded pixels");
  const test_support::VisibilityAgreement lo = test_support::two_plane_agreement(64);
  r.note("at 64x64 the agreement is " + fmt(100.0 * lo.agree / lo.total) + "% (" + std::to_string(lo.off_edge) +
         " away from edges); the edge band is one pixel wide at any resolution");
  return r;
}

// ---------------------------------------------------------------------------------------------
// 2. Greedy selection

Result greedy_suite() {
  using namespace test_support;
  Result r;
  const ProxyMesh mesh = sphere_mesh();
  const double eps = default_occlusion_eps(mesh);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> az(0, 360), el(-60, 60), rad(2.5, 5.0);
  int exact = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int grid = 4 + static_cast<int>(rng() % 13);
    const int n = 1 + static_cast<int>(rng() % 8);
    const Frame target = sphere_frame(mesh, 100, eye_at(az(rng), el(rng), rad(rng)), 32);
    std::vector<Frame> cands;
    std::vector<Cover> sets;
    std::vector<int> ids;
    for (int c = 0; c < n; ++c) {
      cands.push_back(sphere_frame(mesh, static_cast<int>(rng() % 50) * 8 + c, eye_at(az(rng), el(rng), rad(rng)), 32));
      sets.push_back(oracle_coverage(target, cands.back(), eps, grid));
      ids.push_back(cands.back().id);
    }
    const int count = 1 + static_cast<int>(rng() % n);
    const OracleResult o = oracle_greedy(sets, ids, count);
    const SelectionResult s = select_greedy({target.camera, target.depth}, cands, count, eps, grid);
    exact += s.ids == o.ids && s.gains == o.gains;
  }
  r.check(exact == 200, "select_greedy equals the brute-force greedy (ids, order, gains) on " + std::to_string(exact) +
                            " of 200 random sphere configurations");
  return r;
}

// ---------------------------------------------------------------------------------------------
// 3. Gradient checks

Result gradient_suite() {
  Result r;
  const ProxyMesh mesh = test_support::sphere_mesh();
  UNetSpec es = UNetSpec::effects_net();
  es.encoder_channels = {4, 8};
  EffectsModel em = EffectsModel::create(es, mesh.bounds(), 8);
  em.net->to(torch::kDouble);
  em.net->train();
  std::vector<SiamesePair> batch;
  std::mt19937_64 rng(5);
  const auto view = [&](int id, const Eigen::Vector3d& eye) {
    Frame f;
    f.id = id;
    f.camera = test_support::make_camera(8, 8, 12.8, eye, Eigen::Vector3d::Zero());
    f.depth = rasterize_depth(mesh, f.camera);
    f.image = Image(8, 8, 3);
    for (auto& v : f.image.data) v = std::uniform_real_distribution<float>(0.1f, 0.9f)(rng);
    return f;
  };
  const std::pair<Eigen::Vector3d, Eigen::Vector3d> eyes[] = {{{0.3, 0.2, 3.0}, {0.9, 0.5, 2.8}},
                                                              {{-0.6, 0.1, 2.9}, {0.1, -0.3, 3.0}}};
  for (const auto& [ep, eq] : eyes) {
    const Frame p = view(0, ep), q = view(1, eq);
    batch.push_back(make_siamese_pair(p, q, gbuffer_from_depth(p.camera, p.depth), gbuffer_from_depth(q.camera, q.depth),
                                      mesh.bounds(), default_occlusion_eps(mesh)));
  }
  const auto siamese = [&] { return siamese_loss(em.net, batch, 0.01).total; };
  const auto rs = test_support::finite_difference_check(siamese, parameter_list(*em.net), 128, 77);
  r.check(rs.failures == 0 && rs.probes >= 64,
          "Siamese loss: " + std::to_string(rs.probes - rs.failures) + "/" + std::to_string(rs.probes) +
              " probes within 1e-3 relative error (worst " + fmt(rs.worst_relative, 3) + ")");

  CompositionModel cm;
  cm.views = 4;
  UNetSpec gs = UNetSpec::composition_net(4);
  gs.encoder_channels = {4, 8};
  cm.generator = UNet(gs);
  DiscriminatorSpec ds;
  ds.channels = {4, 8};
  cm.discriminator = PatchDiscriminator(ds);
  initialize_weights(*cm.generator, 9);
  initialize_weights(*cm.discriminator, 10);
  cm.generator->to(torch::kDouble);
  cm.discriminator->to(torch::kDouble);
  cm.generator->train();
  cm.discriminator->train();
  torch::manual_seed(4);
  const auto x = torch::rand({2, 23, 8, 8}, torch::kDouble);
  const auto gt = torch::rand({2, 3, 8, 8}, torch::kDouble);
  const TrainConfig cfg;
  const auto g_loss = [&] {
    return composition_loss(cm.discriminator, x, cm.generator->forward(x), gt, cfg).generator;
  };
  const auto rg = test_support::finite_difference_check(g_loss, parameter_list(*cm.generator), 96, 11);
  r.check(rg.failures == 0 && rg.probes >= 64,
          "composition generator loss: " + std::to_string(rg.probes - rg.failures) + "/" + std::to_string(rg.probes) +
              " probes within 1e-3 (worst " + fmt(rg.worst_relative, 3) + ")");
  const auto fake = cm.generator->forward(x).detach();
  const auto d_loss = [&] { return composition_loss(cm.discriminator, x, fake, gt, cfg).discriminator; };
  const auto rd = test_support::finite_difference_check(d_loss, parameter_list(*cm.discriminator), 64, 12);
  r.check(rd.failures == 0 && rd.probes >= 64,
          "composition discriminator loss: " + std::to_string(rd.probes - rd.failures) + "/" +
              std::to_string(rd.probes) + " probes within 1e-3 (worst " + fmt(rd.worst_relative, 3) + ")");
  return r;
}

// ---------------------------------------------------------------------------------------------
// Shared desk-scale experiment

struct Experiment {
  Dataset train, test;
  Dataset lambertian_train, lambertian_test;
  std::optional<EffectsModel> effects_full;
  std::optional<EffectsModel> effects_lambertian;
  std::optional<CompositionModel> comp_effects;
  std::optional<CompositionModel> comp_plain;
  std::vector<EvalReport> reports;
  std::vector<EvalReport> ablation;
};

TrainConfig effects_config(const Settings& s, int steps) {
  TrainConfig c;
  c.epochs = s.effects_epochs;
  c.steps_per_epoch = steps;
  c.batch_size = 4;
  return c;
}

TrainConfig composition_config(const Settings& s) {
  TrainConfig c;
  c.epochs = s.composition_epochs;
  c.steps_per_epoch = s.composition_steps;
  c.batch_size = 4;
  return c;
}

std::pair<Dataset, Dataset> desk_split(bool specular, const Settings& s) {
  const Dataset all = render_synthetic(desk_scene(specular, s.frames), s.resolution, s.resolution);
  return split_train_test(all, 1.0 / 6.0, 7);
}

EffectsModel train_effects_logged(const Dataset& data, const TrainConfig& cfg, const fs::path& ckpt,
                                  const std::string& what) {
  const auto t0 = Clock::now();
  EffectsTrainOptions o;
  o.verbose = true;
  EffectsTrainResult r = train_effects(data, cfg, o);
  r.model.save(ckpt);
  r.history.write_csv(fs::path(ckpt).replace_extension(".csv"));
  log(what + " trained in " + fmt(seconds_since(t0)) + " s, last epoch total " +
      fmt(r.history.epoch_mean(cfg.epochs - 1, "total")));
  return std::move(r.model);
}

CompositionModel train_composition_logged(const Dataset& data, const EffectsModel* fx, const TrainConfig& cfg,
                                          const fs::path& ckpt, const std::string& what) {
  const auto t0 = Clock::now();
  PipelineTrainOptions po;
  po.pipeline.reference_count = 20;
  po.composition.verbose = true;
  CompositionTrainResult r = train_composition(data, fx, cfg, po);
  r.model.save(ckpt);
  r.history.write_csv(fs::path(ckpt).replace_extension(".csv"));
  log(what + " trained in " + fmt(seconds_since(t0)) + " s, last epoch l1 " +
      fmt(r.history.epoch_mean(cfg.epochs - 1, "l1")));
  return std::move(r.model);
}

// Consecutive held-out frames that share visible surface.
std::vector<std::pair<std::size_t, std::size_t>> held_out_pairs(const Dataset& test) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i + 1 < test.frames.size(); ++i) pairs.emplace_back(i, i + 1);
  return pairs;
}

// ---------------------------------------------------------------------------------------------
// 4. Effects separation

Result effects_suite(Experiment& e, const Settings& s) {
  Result r;
  const double eps = default_occlusion_eps(e.train.mesh);
  e.effects_full = train_effects_logged(e.train, effects_config(s, s.effects_steps), s.work / "effects_full.ckpt",
                                        "effects (specular, full data)");
  const auto pairs = held_out_pairs(e.test);
  const double base = cross_view_residual(nullptr, e.test, pairs, eps);
  const double removed = cross_view_residual(&*e.effects_full, e.test, pairs, eps);
  const double reduction = 1.0 - removed / base;
  r.check(reduction >= 0.30, "specular scene, " + std::to_string(pairs.size()) +
                                 " held-out pairs: residual " + fmt(base) + " with zero effects, " + fmt(removed) +
                                 " after removal, reduction " + fmt(100 * reduction) + "% (need >= 30%)");
  r.note("mean predicted effect on the specular test frames: " + fmt(mean_effect_magnitude(*e.effects_full, e.test)));

  // Same budget as the specular model: only the regularizer pulls a constant output towards zero.
  e.effects_lambertian = train_effects_logged(e.lambertian_train, effects_config(s, s.effects_steps),
                                              s.work / "effects_lambertian.ckpt", "effects (Lambertian)");
  const double magnitude = mean_effect_magnitude(*e.effects_lambertian, e.lambertian_test);
  r.check(magnitude < 0.05, "Lambertian scene: mean predicted effect magnitude " + fmt(magnitude) + " (need < 0.05)");
  return r;
}

// ---------------------------------------------------------------------------------------------
// 5. Ordering against the baselines, effects ablation and the halving series

Result ordering_suite(Experiment& e, const Settings& s) {
  Result r;
  if (!e.effects_full)
    e.effects_full = train_effects_logged(e.train, effects_config(s, s.effects_steps), s.work / "effects_full.ckpt",
                                          "effects (specular, full data)");
  const TrainConfig cc = composition_config(s);
  e.comp_effects = train_composition_logged(e.train, &*e.effects_full, cc, s.work / "composition_effects.ckpt",
                                            "composition with effects");
  e.comp_plain = train_composition_logged(e.train, nullptr, cc, s.work / "composition_plain.ckpt",
                                          "composition without effects");

  const SessionState with = make_session(e.train, e.effects_full, *e.comp_effects);
  const SessionState without = make_session(e.train, std::nullopt, *e.comp_plain);
  EvalReport ours = evaluate(with, e.test, Method::Ours);
  EvalReport plain = evaluate(without, e.test, Method::Ours);
  plain.effects = false;
  const EvalReport nibr = evaluate(with, e.test, Method::NaiveIBR);
  const EvalReport tri = evaluate(with, e.test, Method::PerTriangle);
  e.reports = {ours, plain, nibr, tri};

  r.check(ours.aggregate() < nibr.aggregate(),
          "pipeline MSE " + fmt(ours.aggregate()) + " < naive IBR MSE " + fmt(nibr.aggregate()));
  r.check(ours.aggregate() < tri.aggregate(),
          "pipeline MSE " + fmt(ours.aggregate()) + " < per-triangle IBR MSE " + fmt(tri.aggregate()));
  r.check(ours.aggregate() <= plain.aggregate(), "MSE with effects " + fmt(ours.aggregate()) +
                                                     " <= without effects " + fmt(plain.aggregate()));

  AblationConfig ac;
  ac.cells = {{0.5, true}, {0.25, true}};
  ac.effects_config = effects_config(s, s.effects_steps);
  ac.composition_config = cc;
  ac.pipeline.reference_count = 20;
  ac.verbose = true;
  const auto t0 = Clock::now();
  e.ablation = run_ablation(e.train, e.test, ac);
  log("halving series trained and evaluated in " + fmt(seconds_since(t0)) + " s");
  EvalReport full = ours;
  full.train_fraction = 1.0;
  for (const auto& a : e.ablation)
    r.note("training fraction " + fmt(a.train_fraction) + ": MSE " + fmt(a.aggregate()));
  const double quarter = e.ablation.back().aggregate();
  r.check(quarter <= 3.0 * full.aggregate(), "MSE at 1/4 data " + fmt(quarter) + " within 3x of full-data MSE " +
                                                 fmt(full.aggregate()) + " (ratio " +
                                                 fmt(quarter / full.aggregate()) + ")");

  std::vector<EvalReport> all = e.reports;
  all.insert(all.begin() + 1, e.ablation.begin(), e.ablation.end());
  write_report_csv(e.reports, s.work / "report.csv");
  write_summary_csv(all, s.work / "summary.csv");
  return r;
}

// ---------------------------------------------------------------------------------------------
// 6. Determinism and round trips

bool same_parameters(const torch::nn::Module& a, const torch::nn::Module& b) {
  const auto pa = a.named_parameters(), pb = b.named_parameters();
  if (pa.size() != pb.size()) return false;
  for (const auto& item : pa)
    if (!torch::equal(item.value(), pb[item.key()])) return false;
  const auto ba = a.named_buffers(), bb = b.named_buffers();
  for (const auto& item : ba)
    if (!torch::equal(item.value(), bb[item.key()])) return false;
  return true;
}

bool same_history(const LossHistory& a, const LossHistory& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i)
    if (a.records[i].terms != b.records[i].terms || a.records[i].epoch != b.records[i].epoch) return false;
  return true;
}

bool same_dataset(const Dataset& a, const Dataset& b) {
  if (a.frames.size() != b.frames.size()) return false;
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    const Frame &fa = a.frames[i], &fb = b.frames[i];
    if (fa.id != fb.id || !(fa.image == fb.image) || !(fa.depth == fb.depth) || !(fa.camera == fb.camera)) return false;
  }
  return a.mesh.vertices == b.mesh.vertices && a.mesh.triangles == b.mesh.triangles;
}

Result determinism_suite(const Experiment& e, const Settings& s) {
  Result r;
  const std::vector<int> ids = e.train.ids();
  const Dataset small = subset(e.train, std::vector<int>(ids.begin(), ids.begin() + 24));
  TrainConfig ec;
  ec.epochs = 4;
  ec.steps_per_epoch = 3;
  ec.batch_size = 2;
  const EffectsTrainResult a = train_effects(small, ec);
  const EffectsTrainResult b = train_effects(small, ec);
  r.check(same_history(a.history, b.history) && same_parameters(*a.model.net, *b.model.net),
          "two fixed-seed effects runs are bit-identical (losses and parameters)");

  TrainConfig half = ec;
  half.epochs = 2;
  EffectsTrainOptions first;
  first.checkpoint = s.work / "determinism_effects.ckpt";
  train_effects(small, half, first);
  EffectsTrainOptions second;
  second.resume = first.checkpoint;
  const EffectsTrainResult resumed = train_effects(small, ec, second);
  r.check(same_history(a.history, resumed.history) && same_parameters(*a.model.net, *resumed.model.net),
          "effects run resumed after 2 of 4 epochs matches the uninterrupted run bit for bit");

  a.model.save(s.work / "determinism_effects_final.ckpt");
  const EffectsModel loaded = EffectsModel::load(s.work / "determinism_effects_final.ckpt");
  const GBuffer g = gbuffer_from_depth(small.frames[0].camera, small.frames[0].depth);
  r.check(same_parameters(*a.model.net, *loaded.net) && effects_forward(a.model, g) == effects_forward(loaded, g),
          "effects checkpoint save/load reproduces parameters and outputs");

  TrainConfig cc = ec;
  PipelineTrainOptions po;
  po.pipeline.reference_count = 8;
  const CompositionTrainResult ca = train_composition(small, &a.model, cc, po);
  const CompositionTrainResult cb = train_composition(small, &a.model, cc, po);
  r.check(same_history(ca.history, cb.history) && same_parameters(*ca.model.generator, *cb.model.generator) &&
              same_parameters(*ca.model.discriminator, *cb.model.discriminator),
          "two fixed-seed composition runs are bit-identical");
  PipelineTrainOptions p1 = po;
  p1.composition.checkpoint = s.work / "determinism_composition.ckpt";
  TrainConfig chalf = cc;
  chalf.epochs = 2;
  train_composition(small, &a.model, chalf, p1);
  PipelineTrainOptions p2 = po;
  p2.composition.resume = p1.composition.checkpoint;
  const CompositionTrainResult cr = train_composition(small, &a.model, cc, p2);
  r.check(same_history(ca.history, cr.history) && same_parameters(*ca.model.generator, *cr.model.generator) &&
              same_parameters(*ca.model.discriminator, *cr.model.discriminator),
          "composition run resumed after 2 of 4 epochs matches the uninterrupted run");

  store_dataset(e.test, s.work / "roundtrip_data");
  const Dataset back = load_dataset(s.work / "roundtrip_data");
  store_dataset(back, s.work / "roundtrip_data_2");
  const Dataset back2 = load_dataset(s.work / "roundtrip_data_2");
  r.check(same_dataset(e.test, back) && same_dataset(back, back2),
          "dataset store/load is lossless (" + std::to_string(back.frames.size()) + " frames, twice)");
  return r;
}

// ---------------------------------------------------------------------------------------------
// 7. Service contract

Result service_suite(Experiment& e, const Settings& s) {
  Result r;
  std::shared_ptr<const SessionState> session;
  if (e.comp_effects && e.effects_full) {
    session = std::make_shared<const SessionState>(make_session(e.train, e.effects_full, *e.comp_effects));
  } else {
    // Criterion 7 on its own: untrained full-size networks have the same cost.
    CompositionModel comp = CompositionModel::create(4, e.train.mesh.bounds(), 1);
    comp.reference_ids = select_reference_views(e.train, 20, default_occlusion_eps(e.train.mesh));
    session = std::make_shared<const SessionState>(
        make_session(e.train, EffectsModel::create(UNetSpec::effects_net(), e.train.mesh.bounds(), 1), comp));
    r.note("using untrained full-size networks (criteria 4 and 5 were not run)");
  }
  RenderServer server(session, {"127.0.0.1", 0, std::nullopt});
  server.start();
  httplib::Client cli("127.0.0.1", server.port());
  cli.set_read_timeout(120, 0);
  const std::string pose = R"({"orbit":{"azimuth_deg":35,"elevation_deg":15,"radius":4.0},"resolution":[128,128]})";
  auto health = cli.Get("/healthz");
  r.check(health && health->status == 200 && health->body == "ok", "GET /healthz answers ok");
  auto warm = cli.Post("/render", pose, "application/json");
  double worst = 0.0;
  bool ok = warm && warm->status == 200;
  for (int i = 0; i < 5 && ok; ++i) {
    const auto t0 = Clock::now();
    auto res = cli.Post("/render", pose, "application/json");
    worst = std::max(worst, seconds_since(t0));
    ok = res && res->status == 200 && res->body == warm->body;
  }
  r.check(ok && worst < 2.0, "POST /render at 128x128: slowest of 5 requests " + fmt(worst, 3) + " s (limit 2 s)");
  if (ok) {
    const Image png = decode_png(std::vector<std::uint8_t>(warm->body.begin(), warm->body.end()));
    r.note("rendered image " + std::to_string(png.width) + "x" + std::to_string(png.height));
  }

  const int port = server.port();
  std::vector<std::future<std::string>> replies;
  for (int i = 0; i < 8; ++i)
    replies.push_back(std::async(std::launch::async, [port, &pose] {
      httplib::Client c("127.0.0.1", port);
      c.set_read_timeout(120, 0);
      auto res = c.Post("/render", pose, "application/json");
      return res && res->status == 200 ? res->body : std::string();
    }));
  int identical = 0;
  for (auto& f : replies) {
    const std::string body = f.get();
    identical += !body.empty() && warm && body == warm->body;
  }
  r.check(identical == 8, std::to_string(identical) + " of 8 concurrent identical requests returned bit-identical PNGs");
  auto viewer = cli.Get("/index.html");
  r.check(viewer && viewer->status == 404,
          "service runs with no viewer assets configured (static route answers 404, API unaffected)");
  server.stop();
  return r;
}

bool wanted(const Settings& s, int id) {
  return s.only.empty() || std::find(s.only.begin(), s.only.end(), id) != s.only.end();
}

}  // namespace

int main(int argc, char** argv) {
  Settings s;
  CLI::App app{"Desk-scale acceptance run"};
  app.add_option("--work", s.work, "directory for trained models and reports")->capture_default_str();
  app.add_option("--frames", s.frames, "frames on the spiral path (1/6 held out)")->capture_default_str();
  app.add_option("--resolution", s.resolution)->capture_default_str();
  app.add_option("--effects-epochs", s.effects_epochs)->capture_default_str();
  app.add_option("--effects-steps", s.effects_steps, "steps per effects epoch")->capture_default_str();
  app.add_option("--composition-epochs", s.composition_epochs)->capture_default_str();
  app.add_option("--composition-steps", s.composition_steps, "steps per composition epoch")->capture_default_str();
  app.add_option("--only", s.only, "run only these criteria (1-7)");
  CLI11_PARSE(app, argc, argv);

  torch::set_num_threads(1);
  fs::create_directories(s.work);
  const auto start = Clock::now();

  struct Entry {
    int id;
    std::string title;
    std::function<Result()> run;
  };
  Experiment e;
  const bool needs_data = wanted(s, 4) || wanted(s, 5) || wanted(s, 6) || wanted(s, 7);
  if (needs_data) {
    std::tie(e.train, e.test) = desk_split(true, s);
    log("desk scene: " + std::to_string(e.train.frames.size()) + " training and " +
        std::to_string(e.test.frames.size()) + " test frames at " + std::to_string(s.resolution) + "x" +
        std::to_string(s.resolution));
  }
  if (wanted(s, 4)) std::tie(e.lambertian_train, e.lambertian_test) = desk_split(false, s);

  const std::vector<Entry> entries{
      {1, "geometry oracle suite", [] { return geometry_suite(); }},
      {2, "greedy selection oracle", [] { return greedy_suite(); }},
      {3, "gradient checks", [] { return gradient_suite(); }},
      {4, "effects separation", [&] { return effects_suite(e, s); }},
      {5, "ordering against baselines and ablations", [&] { return ordering_suite(e, s); }},
      {6, "determinism and round trips", [&] { return determinism_suite(e, s); }},
      {7, "service contract", [&] { return service_suite(e, s); }},
  };

  std::vector<std::pair<int, bool>> verdicts;
  std::ostringstream summary;
  for (const auto& entry : entries) {
    if (!wanted(s, entry.id)) continue;
    log("criterion " + std::to_string(entry.id) + ": " + entry.title);
    const auto t0 = Clock::now();
    Result res;
    try {
      res = entry.run();
    } catch (const std::exception& ex) {
      res.check(false, std::string("aborted: ") + ex.what());
    }
    const double secs = seconds_since(t0);
    std::ostringstream block;
    block << "criterion " << entry.id << " (" << entry.title << "): " << (res.pass ? "PASS" : "FAIL") << "  ["
          << fmt(secs, 4) << " s]\n";
    for (const auto& l : res.lines) block << "    " << l << '\n';
    std::cout << block.str() << std::flush;
    summary << block.str();
    verdicts.emplace_back(entry.id, res.pass);
  }

  int passed = 0;
  for (const auto& [id, ok] : verdicts) passed += ok;
  std::ostringstream tail;
  tail << "acceptance: " << passed << "/" << verdicts.size() << " criteria passed in "
       << fmt(seconds_since(start) / 60.0, 4) << " min\n";
  std::cout << tail.str();
  std::ofstream(s.work / "acceptance.txt") << summary.str() << tail.str();
  return passed == static_cast<int>(verdicts.size()) ? 0 : 1;
}
