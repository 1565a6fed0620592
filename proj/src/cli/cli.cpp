#include "oaknee/cli/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>


#include "oaknee/cli/report.hpp"
#include "oaknee/error.hpp"
#include "oaknee/eval/forest.hpp"
#include "oaknee/eval/robustness.hpp"
#include "oaknee/eval/roc.hpp"
#include "oaknee/eval/stats.hpp"
#include "oaknee/io/checkpoint.hpp"
#include "oaknee/io/features.hpp"
#include "oaknee/io/manifest.hpp"
#include "oaknee/io/pgm.hpp"
#include "oaknee/io/points.hpp"
#include "oaknee/io/synth.hpp"
#include "oaknee/models/gradcheck_suite.hpp"
#include "oaknee/parallel.hpp"

namespace oaknee::cli {

namespace fs = std::filesystem;

namespace {

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string manifest;
  std::string test_manifest;
  std::string out;
  std::string roles;
  std::string model = "js2-nn";
  std::string features;
  std::string checkpoint;
  std::string csv;
  std::string density;
  std::string config;
  std::string sigmas = "0,1,3,5";
  std::size_t epochs = 100;
  std::size_t batch = 64;
  double lr = 0.01;
  std::uint64_t seed = 0;
  std::uint64_t synth_seed = 7;
  bool deterministic = false;
  double val_fraction = 0.1;
  bool augment = false;
  bool patches = false;
  std::size_t n = 400;
  double oa_fraction = 0.5;
  std::size_t trees = 100;
  std::size_t seeds = 20;
};

geometry::LandmarkRoles roles_of(const Options& o) {
  return o.roles.empty() ? geometry::LandmarkRoles::defaults() : io::read_roles(o.roles);
}

std::string default_features(models::Arch arch) {
  switch (arch) {
    case models::Arch::kTinyCnn: return "roi";
    case models::Arch::kCombined: return "js2,roi";
    default: return "js2";
  }
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument("not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw InvalidArgument("empty number list");
  return out;
}

models::TrainConfig train_config(const Options& o) {
  models::TrainConfig tc;
  tc.epochs = o.epochs;
  tc.batch_size = o.batch;
  tc.lr0 = o.lr;
  tc.seed = o.seed;
  tc.augment = o.augment;
  if (o.batch < 2) throw InvalidArgument("--batch must be at least 2");
  if (!(o.lr > 0)) throw InvalidArgument("--lr must be positive");
  tc.on_epoch = [](const models::EpochRecord& r) {
    std::fprintf(stderr, "epoch %zu lr %g loss %.6f val_auc %.4f\n", r.epoch, r.lr, r.train_loss, r.val_auc);
  };
  return tc;
}

models::Dataset manifest_dataset(const std::string& manifest, io::Split split, const Options& o,
                                 const io::FeatureSpec& spec) {
  const auto entries = io::load_dataset(manifest, split, o.seed, o.val_fraction);
  if (entries.empty()) throw EmptyDataset("no knees in the " + std::string(split == io::Split::kVal ? "val" : split == io::Split::kTrain ? "train" : "test") + " split of '" + manifest + "'");
  return io::build_dataset(entries, spec, roles_of(o));
}

int cmd_synth(const Options& o) {
  io::SynthConfig cfg = o.config.empty() ? io::SynthConfig{} : io::read_synth_config(o.config);
  cfg.n_knees = o.n;
  cfg.oa_fraction = o.oa_fraction;
  cfg.seed = o.synth_seed;
  cfg.validate();
  const auto manifest = io::synth_generate(cfg, o.out);
  std::cout << "wrote " << cfg.n_knees << " knees: " << manifest.string() << "\n";
  return kExitOk;
}

int cmd_preprocess(const Options& o) {
  auto entries = io::read_manifest(o.manifest);
  const auto roles = roles_of(o);
  const fs::path out(o.out);
  fs::create_directories(out / "images");
  fs::create_directories(out / "points");
  std::vector<io::ManifestEntry> written(entries.size());
  parallel_for(entries.size(), [&](std::size_t i) {
    const auto in = io::load_knee(entries[i]);
    const auto knee = io::preprocess_knee(in.image, in.points, roles);
    io::ManifestEntry e = entries[i];
    e.image_path = out / "images" / (e.knee_id + ".pgm");
    e.points_path = out / "points" / (e.knee_id + ".pts");
    e.spacing_mm = knee.image.spacing();
    io::write_pgm(e.image_path, knee.image);
    io::write_points(e.points_path, knee.landmarks.points());
    written[i] = std::move(e);
  });
  io::write_manifest(out / "manifest.csv", written);
  io::write_roles(out / "roles.json", roles);
  std::cout << "preprocessed " << written.size() << " knees: " << (out / "manifest.csv").string() << "\n";
  return kExitOk;
}

int cmd_describe(const Options& o) {
  const auto entries = io::read_manifest(o.manifest);
  const auto roles = roles_of(o);
  const auto spec = io::FeatureSpec::parse("js2,jsw");
  models::Dataset data;
  data.feature_names = spec.names();
  data.samples.resize(entries.size());
  std::vector<char> intersect(entries.size(), 0);
  parallel_for(entries.size(), [&](std::size_t i) {
    const auto in = io::load_knee(entries[i]);
    const auto knee = io::preprocess_knee(in.image, in.points, roles);
    const auto d = io::describe_knee(knee, spec);
    intersect[i] = d.jsw.contours_intersect;
    data.samples[i] = {in.knee_id, in.subject_id, in.label, {}, io::feature_vector(d, spec)};
  });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (intersect[i]) std::cerr << "warning: " << entries[i].knee_id << ": femur and tibia contours intersect\n";
  }
  const fs::path path = fs::path(o.out) / "features.csv";
  write_feature_csv(path, data);
  std::cout << "described " << data.size() << " knees: " << path.string() << "\n";
  return kExitOk;
}

int cmd_texture(const Options& o) {
  const auto entries = io::read_manifest(o.manifest);
  const auto roles = roles_of(o);
  const auto spec = io::FeatureSpec::parse("lbp,fd");
  const fs::path out(o.out);
  if (o.patches) fs::create_directories(out / "patches");
  models::Dataset data;
  data.feature_names = spec.names();
  data.samples.resize(entries.size());
  parallel_for(entries.size(), [&](std::size_t i) {
    const auto in = io::load_knee(entries[i]);
    const auto knee = io::preprocess_knee(in.image, in.points, roles);
    const auto d = io::describe_knee(knee, spec);
    if (o.patches) io::write_pgm(out / "patches" / (in.knee_id + ".pgm"), d.roi.patch);
    data.samples[i] = {in.knee_id, in.subject_id, in.label, {}, io::feature_vector(d, spec)};
  });
  write_feature_csv(out / "texture.csv", data);
  std::cout << "texture features for " << data.size() << " knees: " << (out / "texture.csv").string() << "\n";
  return kExitOk;
}

int cmd_train(const Options& o) {
  const auto arch = models::parse_arch(o.model);
  const std::string tag = o.features.empty() ? default_features(arch) : o.features;
  const auto spec = io::FeatureSpec::parse(tag);
  if ((arch == models::Arch::kTinyCnn || arch == models::Arch::kCombined) && !spec.roi) {
    throw InvalidArgument("model " + o.model + " needs the roi feature");
  }
  const auto train = manifest_dataset(o.manifest, io::Split::kTrain, o, spec);
  const auto val = manifest_dataset(o.manifest, io::Split::kVal, o, spec);
  const auto result = models::fit_model(arch, train, val, train_config(o), spec.tag());
  const fs::path out(o.out);
  io::save_checkpoint(out / "model.oakn", result.model);
  write_history_csv(out / "history.csv", result.history);
  std::cout << "trained " << o.model << " on " << train.size() << " knees (val " << val.size()
            << "): best epoch " << result.best_epoch << ", val AUC " << format_number(result.best_val_auc) << "\n";
  return kExitOk;
}

int cmd_eval(const Options& o) {
  const auto model = io::load_checkpoint(o.checkpoint);
  const auto spec = io::FeatureSpec::parse(model.feature_tag);
  const auto test = manifest_dataset(o.manifest, io::Split::kTest, o, spec);
  const auto scores = models::predict_scores(model, test);
  const auto roc = eval::roc_auc(scores, test.labels());
  const fs::path out(o.out);
  write_roc_csv(out / "roc_curve.csv", roc);
  write_scores_csv(out / "scores.csv", test, scores);
  Series s{models::arch_tag(model.arch), {}, {}};
  for (const auto& p : roc.curve) s.x.push_back(p.fpr), s.y.push_back(p.tpr);
  write_text(out / "roc_curve.svg", svg_line_chart("ROC (AUC " + format_number(std::round(roc.auc * 1e4) / 1e4) + ")",
                                                   "false positive rate", "true positive rate", {s}));
  char line[64];
  std::snprintf(line, sizeof line, "AUC: %.4f\n", roc.auc);
  std::cout << line;
  return kExitOk;
}

int cmd_importance(const Options& o) {
  const auto data = read_feature_csv(o.csv);
  eval::ForestConfig fc;
  fc.n_trees = o.trees;
  fc.seed = o.seed;
  const auto labels = data.labels();
  const auto report = eval::forest_importance(data.feature_matrix(), data.feature_dim(), labels, fc);
  const fs::path out(o.out);
  write_importance_csv(out / "importance.csv", data.feature_names, report);
  std::vector<std::string> top_names;
  std::vector<double> top_values;
  for (std::size_t r = 0; r < std::min<std::size_t>(30, report.ranking.size()); ++r) {
    top_names.push_back(data.feature_names[report.ranking[r]]);
    top_values.push_back(report.importance[report.ranking[r]]);
  }
  write_text(out / "importance.svg", svg_bar_chart("Feature importance (top 30)", top_names, top_values));
  for (std::size_t r = 0; r < std::min<std::size_t>(10, report.ranking.size()); ++r) {
    std::cout << r + 1 << ' ' << data.feature_names[report.ranking[r]] << ' '
              << format_number(report.importance[report.ranking[r]]) << "\n";
  }
  if (!o.density.empty()) {
    const auto it = std::find(data.feature_names.begin(), data.feature_names.end(), o.density);
    if (it == data.feature_names.end()) throw InvalidArgument("no feature column '" + o.density + "'");
    const auto column = data.feature_column(static_cast<std::size_t>(it - data.feature_names.begin()));
    const auto stats = eval::class_density_stats(column, labels);
    write_density_csv(out / "density.csv", stats);
    write_text(out / "density.svg",
               svg_line_chart(o.density + " by class", o.density, "density",
                              {{"non-OA", stats.bin_centers, stats.density[0]}, {"OA", stats.bin_centers, stats.density[1]}}));
    for (int c = 0; c < 2; ++c) {
      std::cout << (c ? "OA" : "non-OA") << ' ' << o.density << " mean " << format_number(stats.classes[c].mean)
                << " std " << format_number(stats.classes[c].stddev) << " n " << stats.classes[c].count << "\n";
    }
  }
  return kExitOk;
}

int cmd_noise_sweep(const Options& o) {
  eval::NoiseSweepConfig cfg;
  cfg.sigmas = parse_number_list(o.sigmas);
  cfg.models.clear();
  std::stringstream ss(o.model);
  std::string tag;
  while (std::getline(ss, tag, ',')) cfg.models.push_back(models::parse_arch(tag));
  const std::string features = o.features.empty() ? "js2" : o.features;
  for (auto arch : cfg.models) {
    if ((arch == models::Arch::kTinyCnn || arch == models::Arch::kCombined) &&
        !io::FeatureSpec::parse(features).roi) {
      throw InvalidArgument("model " + models::arch_tag(arch) + " needs --features with roi");
    }
  }
  const auto spec = io::FeatureSpec::parse(features);
  if (!spec.js2) throw InvalidArgument("the noise sweep perturbs js2; --features must include it");
  cfg.train = train_config(o);
  cfg.seed = o.seed;
  cfg.feature_tag = spec.tag();
  const auto train = manifest_dataset(o.manifest, io::Split::kTrain, o, spec);
  const auto val = manifest_dataset(o.manifest, io::Split::kVal, o, spec);
  const auto test = manifest_dataset(o.test_manifest, io::Split::kTest, o, spec);
  const auto rows = eval::noise_sweep(train, val, test, cfg);
  const fs::path out(o.out);
  write_noise_sweep_csv(out / "noise_sweep.csv", rows);
  std::vector<Series> series;
  for (const auto& r : rows) {
    auto it = std::find_if(series.begin(), series.end(), [&](const Series& s) { return s.name == r.model; });
    if (it == series.end()) it = series.insert(series.end(), Series{r.model, {}, {}});
    it->x.push_back(r.sigma_mm);
    it->y.push_back(r.auc);
  }
  write_text(out / "noise_sweep.svg", svg_line_chart("Test AUC under JS2 noise", "noise std (mm)", "AUC", series));
  for (const auto& r : rows) std::cout << format_number(r.sigma_mm) << ' ' << r.model << ' ' << format_number(r.auc) << "\n";
  return kExitOk;
}

int cmd_gradcheck(const Options& o) {
  const auto results = models::run_gradcheck_suite(o.seeds, o.seed);
  bool ok = true;
  char line[160];
  std::snprintf(line, sizeof line, "%-22s %10s %12s %8s %10s  %s\n", "target", "tolerance", "max_rel_err", "seeds",
                "skipped", "status");
  std::cout << line;
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%-22s %10.0e %12.3e %8zu %10zu  %s\n", r.target.c_str(), r.tolerance,
                  r.max_rel_error, r.seeds, r.skipped, r.passed() ? "pass" : "FAIL");
    std::cout << line;
    ok = ok && r.passed();
  }
  if (!ok) throw CheckFailure("gradient check failed");
  return kExitOk;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const CheckFailure*>(&e)) return kExitCheck;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return err->kind() == "InvalidArgument" ? kExitUsage : kExitData;
  }
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return kExitData;
  return kExitCheck;
}

int run(int argc, const char* const* argv) {
  Options o;
  CLI::App app{"Knee osteoarthritis detection from joint-space geometry and bone texture"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  auto seed_flags = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "Random seed (data split, initialization, shuffling)")->capture_default_str();
    c->add_flag("--deterministic", o.deterministic,
                "Fixed-order reductions (always on; accepted for compatibility)");
  };
  auto roles_flag = [&](CLI::App* c) {
    c->add_option("--roles", o.roles, "Landmark role JSON (default: bundled 74-point layout)");
  };
  auto train_flags = [&](CLI::App* c) {
    c->add_option("--epochs", o.epochs, "Training epochs")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--batch", o.batch, "Mini-batch size")->capture_default_str();
    c->add_option("--lr", o.lr, "Initial learning rate")->capture_default_str();
    c->add_option("--val-fraction", o.val_fraction, "Fraction of training subjects held out for validation")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    c->add_flag("--augment", o.augment, "Random rotation, gamma and brightness augmentation");
  };

  auto* synth = app.add_subcommand("synth", "Generate a calibrated synthetic cohort");
  synth->add_option("--n", o.n, "Number of knees")->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--oa-fraction", o.oa_fraction, "Fraction of OA knees")->capture_default_str();
  synth->add_option("--config", o.config, "SynthConfig JSON; --n, --oa-fraction and --seed override it");
  synth->add_option("--out", o.out, "Output directory")->required();
  synth->add_option("--seed", o.synth_seed, "Generator seed")->capture_default_str();
  synth->add_flag("--deterministic", o.deterministic, "Fixed-order reductions (always on; accepted for compatibility)");

  auto* pre = app.add_subcommand("preprocess", "Normalize, resample and align every knee of a manifest");
  pre->add_option("--manifest", o.manifest, "Input manifest CSV")->required();
  pre->add_option("--out", o.out, "Output directory")->required();
  roles_flag(pre);
  seed_flags(pre);

  auto* describe = app.add_subcommand("describe", "JS2, minJSW and fJSW feature CSV");
  describe->add_option("--manifest", o.manifest, "Input manifest CSV")->required();
  describe->add_option("--out", o.out, "Output directory (features.csv)")->required();
  roles_flag(describe);
  seed_flags(describe);

  auto* tex = app.add_subcommand("texture", "LBP and fractal-dimension CSV of the medial ROI");
  tex->add_option("--manifest", o.manifest, "Input manifest CSV")->required();
  tex->add_option("--out", o.out, "Output directory (texture.csv)")->required();
  tex->add_flag("--patches", o.patches, "Also write the ROI patches as 8-bit PGM");
  roles_flag(tex);
  seed_flags(tex);

  auto* train = app.add_subcommand("train", "Train a model and write a checkpoint plus history");
  train->add_option("--manifest", o.manifest, "Training manifest CSV (validation carved by subject)")->required();
  train->add_option("--out", o.out, "Output directory (model.oakn, history.csv)")->required();
  train->add_option("--model", o.model, "lr, js2-nn, cnn or combined")->capture_default_str();
  train->add_option("--features", o.features,
                    "Comma list of js2, jsw, minjsw, lbp, fd, roi (default: js2; roi for cnn; js2,roi for combined)");
  train_flags(train);
  roles_flag(train);
  seed_flags(train);

  auto* ev = app.add_subcommand("eval", "Test AUC and ROC curve of a checkpoint");
  ev->add_option("--checkpoint", o.checkpoint, "Checkpoint file")->required();
  ev->add_option("--manifest", o.manifest, "Test manifest CSV")->required();
  ev->add_option("--out", o.out, "Output directory (roc_curve.csv, roc_curve.svg, scores.csv)")->required();
  roles_flag(ev);
  seed_flags(ev);

  auto* imp = app.add_subcommand("importance", "Forest feature importance of a feature CSV");
  imp->add_option("--csv", o.csv, "Feature CSV (knee_id,label,features...)")->required();
  imp->add_option("--out", o.out, "Output directory (importance.csv, importance.svg)")->required();
  imp->add_option("--trees", o.trees, "Number of trees")->capture_default_str()->check(CLI::PositiveNumber);
  imp->add_option("--density", o.density, "Also write per-class density.csv for this column, e.g. js2_192");
  seed_flags(imp);

  auto* sweep = app.add_subcommand("noise-sweep", "Retrain under Gaussian JS2 noise and record test AUC");
  sweep->add_option("--manifest", o.manifest, "Training manifest CSV")->required();
  sweep->add_option("--test-manifest", o.test_manifest, "Test manifest CSV")->required();
  sweep->add_option("--out", o.out, "Output directory (noise_sweep.csv, noise_sweep.svg)")->required();
  sweep->add_option("--model", o.model, "Comma list of model tags")->capture_default_str();
  sweep->add_option("--features", o.features, "Feature tags (must include js2; default js2)");
  sweep->add_option("--sigmas", o.sigmas, "Comma list of noise std values in mm")->capture_default_str();
  train_flags(sweep);
  roles_flag(sweep);
  seed_flags(sweep);

  auto* grad = app.add_subcommand("gradcheck", "Finite-difference gradient checks of every layer");
  grad->add_option("--seeds", o.seeds, "Seeds per layer")->capture_default_str()->check(CLI::PositiveNumber);
  seed_flags(grad);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!o.out.empty()) fs::create_directories(o.out);
    if (*synth) return cmd_synth(o);
    if (*pre) return cmd_preprocess(o);
    if (*describe) return cmd_describe(o);
    if (*tex) return cmd_texture(o);
    if (*train) return cmd_train(o);
    if (*ev) return cmd_eval(o);
    if (*imp) return cmd_importance(o);
    if (*sweep) return cmd_noise_sweep(o);
    if (*grad) return cmd_gradcheck(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitUsage;
}

}  // namespace oaknee::cli
