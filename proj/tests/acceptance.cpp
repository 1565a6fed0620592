// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <thread>
#include <vector>

#include "oaknee/error.hpp"
#include "oaknee/eval/forest.hpp"
#include "oaknee/eval/robustness.hpp"
#include "oaknee/eval/roc.hpp"
#include "oaknee/eval/stats.hpp"
#include "oaknee/geometry/geometry.hpp"
#include "oaknee/io/checkpoint.hpp"
#include "oaknee/io/features.hpp"
#include "oaknee/io/manifest.hpp"
#include "oaknee/io/pgm.hpp"
#include "oaknee/io/points.hpp"
#include "oaknee/io/synth.hpp"
#include "oaknee/models/gradcheck_suite.hpp"
#include "oaknee/models/networks.hpp"
#include "oaknee/models/train.hpp"
#include "oaknee/parallel.hpp"
#include "test_support.hpp"

using namespace oaknee;
namespace fs = std::filesystem;
using geometry::LandmarkRoles;
using geometry::LandmarkSet;
using geometry::Point2D;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int g_failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("Criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

// Runs one criterion; an escaped exception counts as FAIL with its message.
void criterion(int id, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [pass, detail] = body();
    report(id, pass, detail);
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

std::vector<Point2D> random_cloud(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-150.0, 150.0);
  std::vector<Point2D> p(n);
  for (auto& q : p) q = {u(rng), u(rng)};
  return p;
}

geometry::RigidTransform random_rigid(Rng& rng) {
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> shift(-200.0, 200.0);
  return {ang(rng), shift(rng), shift(rng)};
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// ---------------------------------------------------------------------------

std::pair<bool, std::string> descriptor_correctness() {
  const auto t0 = Clock::now();
  const auto roles = LandmarkRoles::defaults();
  Rng rng(101);
  std::size_t mismatches = 0;
  bool length_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto pts = random_cloud(rng, 74);
    const auto js2 = geometry::compute_js2(LandmarkSet(pts, roles));
    length_ok = length_ok && js2.size() == 221;
    std::size_t k = 0;
    for (std::size_t t : roles.tibia_indices) {
      for (std::size_t f : roles.femur_indices) {
        const double oracle = std::hypot(pts[t].x - pts[f].x, pts[t].y - pts[f].y);
        if (k >= js2.size() || js2[k] != oracle) ++mismatches;
        ++k;
      }
    }
  }
  std::vector<bool> seen(221, false);
  bool bijection = true;
  for (std::size_t t = 0; t < 17; ++t) {
    for (std::size_t f = 0; f < 13; ++f) {
      const std::size_t k = geometry::js2_index(t, f);
      if (k >= 221 || seen[k] || geometry::js2_pair(k) != std::pair{t, f}) bijection = false;
      if (k < 221) seen[k] = true;
    }
  }
  bijection = bijection && std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  const double secs = seconds_since(t0);
  return {mismatches == 0 && length_ok && bijection && secs < 1.0,
          fmt("1000 configurations, %zu mismatches, length 221 %s, bijection over 221 pairs %s, %.3f s (< 1 s)",
              mismatches, length_ok ? "ok" : "WRONG", bijection ? "ok" : "BROKEN", secs)};
}

std::pair<bool, std::string> geometric_invariance() {
  io::SynthConfig cfg;
  cfg.n_knees = 20;
  cfg.seed = 202;
  const auto plan = io::make_synth_plan(cfg);
  const auto roles = LandmarkRoles::defaults();
  Rng rng(203);
  double rigid_worst = 0.0, scale_worst = 0.0, fjsw_worst = 0.0;
  std::uniform_real_distribution<double> scale(0.25, 4.0);
  for (int t = 0; t < 100; ++t) {
    const LandmarkSet knee(io::synth_landmarks(cfg, plan, t % cfg.n_knees).points, roles);
    const auto js2 = geometry::compute_js2(knee);
    const double minjsw = geometry::min_jsw(knee).value_mm;
    const double width = geometry::tibia_width(knee);

    const auto moved = knee.transformed(random_rigid(rng));
    const auto js2m = geometry::compute_js2(moved);
    for (std::size_t k = 0; k < js2.size(); ++k) rigid_worst = std::max(rigid_worst, std::abs(js2m[k] - js2[k]));
    rigid_worst = std::max(rigid_worst, std::abs(geometry::min_jsw(moved).value_mm - minjsw));
    rigid_worst = std::max(rigid_worst, std::abs(geometry::tibia_width(moved) - width));

    // The contour sampling step is a length, so it scales with the knee.
    const double s = scale(rng);
    const auto scaled = knee.scaled(s);
    const auto js2s = geometry::compute_js2(scaled);
    for (std::size_t k = 0; k < js2.size(); ++k) scale_worst = std::max(scale_worst, rel_err(js2s[k], s * js2[k]));
    scale_worst = std::max(scale_worst,
                           rel_err(geometry::min_jsw(scaled, s * geometry::kDefaultDensifyStep).value_mm, s * minjsw));
    scale_worst = std::max(scale_worst, rel_err(geometry::tibia_width(scaled), s * width));
    const auto aligned = geometry::align_to_plateau(knee).landmarks;
    const auto aligned_scaled = geometry::align_to_plateau(scaled).landmarks;
    for (double x : {0.225, 0.8}) {
      fjsw_worst = std::max(fjsw_worst, std::abs(geometry::fixed_jsw(aligned_scaled, x) -
                                                 geometry::fixed_jsw(aligned, x)));
    }
  }
  const bool pass = rigid_worst <= 1e-9 && scale_worst <= 1e-9 && fjsw_worst <= 1e-9;
  return {pass, fmt("100 rigid transforms: max abs change %.2e mm (<= 1e-9); uniform scaling: max rel error %.2e "
                    "(<= 1e-9); fJSW under scaling: max change %.2e",
                    rigid_worst, scale_worst, fjsw_worst)};
}

std::pair<bool, std::string> gradient_suite() {
  const auto t0 = Clock::now();
  const auto results = models::run_gradcheck_suite(20, 0);
  const double secs = seconds_since(t0);
  bool pass = secs < 60.0;
  std::string worst;
  for (const auto& r : results) {
    const double required = (r.target == "batchnorm2d" || r.target == "tinycnn") ? 1e-4 : 1e-5;
    const bool ok = r.passed() && r.seeds == 20 && r.tolerance <= required && r.max_rel_error < required;
    pass = pass && ok;
    worst += fmt(" %s=%.1e%s", r.target.c_str(), r.max_rel_error, ok ? "" : "(FAIL)");
  }
  return {pass, fmt("%zu targets x 20 seeds, float64, eps 1e-5, %.1f s (< 60 s);", results.size(), secs) + worst};
}

std::pair<bool, std::string> architecture_conformance() {
  models::TinyCnn<float> net(models::NetConfig{});
  const auto shapes = net.trunk().trace_shapes(nn::Tensor<float>({2, 1, 48, 48}, 0.5f), nn::Mode::kEval);
  const bool shapes_ok = shapes.size() == 13 && shapes[2] == nn::Shape{2, 32, 24, 24} &&
                         shapes[6] == nn::Shape{2, 64, 12, 12} && shapes[10] == nn::Shape{2, 128, 6, 6} &&
                         shapes[12] == nn::Shape{2, 4608};
  // Conv weights and biases, batch-norm scale and shift, then the two FC layers.
  const std::size_t closed_form = (1 * 32 + 32 * 64 + 64 * 128) * 9 + (32 + 64 + 128) + 2 * (32 + 64 + 128) +
                                  (4608 * 256 + 256) + (256 * 2 + 2);
  const std::size_t counted = nn::parameter_count(net.params());
  const bool count_ok = counted == closed_form && counted == 1273538;
  return {shapes_ok && count_ok,
          fmt("pooled maps 24x24 / 12x12 / 6x6 %s, flatten 4608; parameters %zu vs closed form %zu (pinned 1273538)",
              shapes_ok ? "ok" : "WRONG", counted, closed_form)};
}

std::pair<bool, std::string> auc_oracle() {
  Rng rng(505);
  std::uniform_int_distribution<int> size(2, 50), level(0, 9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  double worst = 0.0;
  bool symmetric = true, invariant = true;
  for (int k = 0; k < 200; ++k) {
    const int n = size(rng);
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
      s.push_back(coin(rng) ? level(rng) / 10.0 : u(rng));
      y.push_back(coin(rng));
    }
    y[0] = 0;
    y[1] = 1;
    double wins = 0.0, pairs = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (y[i] != 1 || y[j] != 0) continue;
        pairs += 1.0;
        wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
    }
    const double auc = eval::roc_auc(s, y).auc;
    worst = std::max(worst, std::abs(auc - wins / pairs));
    std::vector<double> neg, mono;
    for (double v : s) {
      neg.push_back(-v);
      mono.push_back(std::exp(5.0 * v) - 3.0);
    }
    symmetric = symmetric && auc + eval::roc_auc(neg, y).auc == 1.0;
    invariant = invariant && eval::roc_auc(mono, y).auc == auc;
  }
  return {worst < 1e-12 && symmetric && invariant,
          fmt("200 instances (n <= 50): max |AUC - pairwise| %.1e (< 1e-12); complement %s; monotone transform %s",
              worst, symmetric ? "exact" : "BROKEN", invariant ? "exact" : "BROKEN")};
}

// ---------------------------------------------------------------------------

struct Cohort {
  models::Dataset train, val, test;
  double build_seconds = 0.0;
};

Cohort build_cohort() {
  const auto t0 = Clock::now();
  io::SynthConfig train_cfg;
  train_cfg.n_knees = 1000;
  train_cfg.seed = 2024;
  io::SynthConfig test_cfg = train_cfg;
  test_cfg.seed = 4048;
  const auto spec = io::FeatureSpec::parse("js2,jsw,roi");
  Cohort c;
  auto [tr, va] = io::split_train_val(io::synth_dataset(train_cfg, spec), 17, 0.1);
  c.train = std::move(tr);
  c.val = std::move(va);
  c.test = io::synth_dataset(test_cfg, spec);
  c.build_seconds = seconds_since(t0);
  return c;
}

double test_auc(const Cohort& c, models::Arch arch, const std::string& features) {
  const auto spec = io::FeatureSpec::parse(features);
  const auto tr = io::select_features(c.train, spec);
  const auto va = io::select_features(c.val, spec);
  const auto te = io::select_features(c.test, spec);
  models::TrainConfig cfg;
  cfg.seed = 1;
  const auto r = models::fit_model(arch, tr, va, cfg, spec.tag());
  return eval::roc_auc(models::predict_scores(r.model, te), te.labels()).auc;
}

std::pair<bool, std::string> end_to_end(const Cohort& c) {
  const auto t0 = Clock::now();
  const double minjsw = test_auc(c, models::Arch::kLogistic, "minjsw");
  const double jsw = test_auc(c, models::Arch::kLogistic, "jsw");
  const double js2nn = test_auc(c, models::Arch::kJs2Net, "js2");
  const double cnn = test_auc(c, models::Arch::kTinyCnn, "roi");
  const double combined = test_auc(c, models::Arch::kCombined, "js2,roi");
  const double total = c.build_seconds + seconds_since(t0);
  const bool order = combined >= std::max(js2nn, cnn) - 0.01 && js2nn > minjsw && jsw > minjsw;
  const bool fast = total < 15 * 60;
  return {order && fast,
          fmt("test AUC minJSW-LR %.4f, minJSW+fJSW-LR %.4f, JS2-NN %.4f, CNN %.4f, combined %.4f; ordering %s; "
              "runtime %.0f s (< 900 s) with %zu worker thread(s)",
              minjsw, jsw, js2nn, cnn, combined, order ? "holds" : "VIOLATED", total, worker_count())};
}

std::pair<bool, std::string> noise_robustness(const Cohort& c) {
  const auto spec = io::FeatureSpec::parse("js2");
  eval::NoiseSweepConfig cfg;
  cfg.sigmas = {0.0, 1.0, 3.0, 5.0};
  cfg.models = {models::Arch::kJs2Net};
  cfg.train.seed = 1;
  cfg.seed = 1;
  const auto rows = eval::noise_sweep(io::select_features(c.train, spec), io::select_features(c.val, spec),
                                      io::select_features(c.test, spec), cfg);
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i) monotone = monotone && rows[i - 1].auc >= rows[i].auc - 0.01;
  const double drop = rows.front().auc - rows.back().auc;
  const bool mild = drop <= 0.05;
  return {monotone && mild,
          fmt("JS2-NN AUC at sigma 0/1/3/5 mm: %.4f / %.4f / %.4f / %.4f; steps within 1 point %s; "
              "drop at 5 mm %.4f (<= 0.05)",
              rows[0].auc, rows[1].auc, rows[2].auc, rows[3].auc, monotone ? "yes" : "NO", drop)};
}

std::pair<bool, std::string> density_calibration(const Cohort& c) {
  const std::size_t col = geometry::js2_index(14, 10);
  std::vector<double> v;
  std::vector<int> y;
  for (const auto* d : {&c.train, &c.val, &c.test}) {
    for (const auto& s : d->samples) {
      v.push_back(s.features.at(col));
      y.push_back(s.label);
    }
  }
  const auto st = eval::class_density_stats(v, y);
  const auto& non = st.classes[0];
  const auto& oa = st.classes[1];
  const bool pass = std::abs(oa.mean - 3.98) <= 0.1 && std::abs(oa.stddev - 1.57) <= 0.2 &&
                    std::abs(non.mean - 5.17) <= 0.1 && std::abs(non.stddev - 0.96) <= 0.2;
  return {pass, fmt("JS2[192] over %zu knees: OA %.3f (std %.3f), non-OA %.3f (std %.3f); targets 3.98 +- 0.1 "
                    "(1.57 +- 0.2), 5.17 +- 0.1 (0.96 +- 0.2)",
                    v.size(), oa.mean, oa.stddev, non.mean, non.stddev)};
}

std::pair<bool, std::string> importance_sanity(const Cohort& c) {
  const auto data = io::select_features(c.train, io::FeatureSpec::parse("js2"));
  const auto x = data.feature_matrix();
  const auto y = data.labels();
  const std::size_t designated = geometry::js2_index(14, 10);
  const std::size_t decile = 221 / 10 + 1;  // top 10% of 221 ranks
  int hits = 0;
  double worst_sum = 0.0;
  std::size_t worst_rank = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    eval::ForestConfig cfg;
    cfg.seed = seed;
    const auto r = eval::forest_importance(x, 221, y, cfg);
    double sum = 0.0;
    for (double v : r.importance) sum += v;
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    const auto rank =
        static_cast<std::size_t>(std::find(r.ranking.begin(), r.ranking.end(), designated) - r.ranking.begin());
    worst_rank = std::max(worst_rank, rank + 1);
    hits += rank < decile;
  }
  return {hits >= 95 && worst_sum <= 1e-9,
          fmt("JS2[192] in the top %zu of 221 in %d/100 runs (>= 95), worst rank %zu; max |sum - 1| %.1e (<= 1e-9)",
              decile, hits, worst_rank, worst_sum)};
}

// ---------------------------------------------------------------------------

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(OAKNEE_BINARY) + " " + args + " >> " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Full CLI pipeline into `root`; returns the first non-zero exit status.
int cli_pipeline(const fs::path& root) {
  const std::string r = root.string();
  const fs::path log = root / "log.txt";
  const std::string tr = r + "/train/manifest.csv";
  const std::string te = r + "/test/manifest.csv";
  const std::vector<std::string> steps = {
      "synth --n 60 --seed 11 --out " + r + "/train",
      "synth --n 40 --seed 12 --out " + r + "/test",
      "preprocess --manifest " + tr + " --out " + r + "/pre",
      "describe --manifest " + tr + " --out " + r + "/desc",
      "texture --manifest " + te + " --out " + r + "/tex",
      "train --manifest " + tr + " --out " + r + "/lr --model lr --features jsw --seed 5 --deterministic",
      "train --manifest " + tr + " --out " + r + "/nn --model js2-nn --epochs 3 --batch 16 --seed 5 --deterministic",
      "train --manifest " + tr + " --out " + r + "/cnn --model cnn --epochs 1 --batch 16 --seed 5 --deterministic",
      "train --manifest " + tr + " --out " + r + "/comb --model combined --epochs 1 --batch 16 --seed 5 "
      "--deterministic --augment",
      "eval --checkpoint " + r + "/nn/model.oakn --manifest " + te + " --out " + r + "/ev_nn",
      "eval --checkpoint " + r + "/comb/model.oakn --manifest " + te + " --out " + r + "/ev_comb",
      "importance --csv " + r + "/desc/features.csv --out " + r + "/imp --trees 20 --seed 5 --density js2_192",
      "noise-sweep --manifest " + tr + " --test-manifest " + te + " --out " + r +
          "/sweep --model lr,js2-nn --epochs 2 --sigmas 0,1,3 --seed 5 --deterministic",
  };
  fs::create_directories(root);
  for (const auto& s : steps) {
    if (const int code = run_cli(s, log); code != 0) return code;
  }
  return 0;
}

std::pair<bool, std::string> determinism() {
  const auto a = oaknee::testing::scratch_dir("accept_run_a");
  const auto b = oaknee::testing::scratch_dir("accept_run_b");
  const int ca = cli_pipeline(a);
  const int cb = cli_pipeline(b);
  if (ca != 0 || cb != 0) return {false, fmt("pipeline exit status %d / %d", ca, cb)};
  std::size_t compared = 0, differing = 0, csvs = 0, checkpoints = 0;
  std::string first_diff;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file() || e.path().filename() == "log.txt") continue;
    const auto rel = fs::relative(e.path(), a);
    const auto ext = rel.extension().string();
    if (ext != ".csv" && ext != ".oakn") continue;
    csvs += ext == ".csv";
    checkpoints += ext == ".oakn";
    ++compared;
    if (!fs::exists(b / rel) || io::read_file_bytes(e.path()) != io::read_file_bytes(b / rel)) {
      ++differing;
      if (first_diff.empty()) first_diff = rel.string();
    }
  }
  fs::remove_all(a);
  fs::remove_all(b);
  const bool pass = differing == 0 && csvs >= 8 && checkpoints >= 4;
  return {pass, fmt("two CLI runs, %zu CSVs and %zu checkpoints compared, %zu differ%s", csvs, checkpoints, differing,
                    first_diff.empty() ? "" : (" (first: " + first_diff + ")").c_str())};
}

std::pair<bool, std::string> format_robustness() {
  const auto dir = oaknee::testing::scratch_dir("accept_fixtures");
  auto write = [&](const std::string& name, const std::string& bytes) {
    std::ofstream(dir / name, std::ios::binary) << bytes;
    return dir / name;
  };
  models::TrainedModel model;
  model.arch = models::Arch::kLogistic;
  model.feature_tag = "jsw";
  model.tensors.push_back({"weight", models::DType::kF64, {3}, {0.5, -1.0, 2.0}});
  model.tensors.push_back({"bias", models::DType::kF64, {1}, {0.1}});
  auto good = io::encode_checkpoint(model);
  auto mutate = [&](auto fn) {
    auto b = good;
    fn(b);
    return std::string(b.begin(), b.end());
  };
  const std::string header = io::kManifestHeader;

  struct Fixture {
    std::string name;
    std::function<void()> read;
  };
  const std::vector<Fixture> fixtures = {
      {"pts: count mismatch", [&] { io::read_points(write("a.pts", "version: 1\nn_points: 3\n{\n1 2\n3 4\n}\n")); }},
      {"pts: non-numeric", [&] { io::read_points(write("b.pts", "version: 1\nn_points: 1\n{\n1 x\n}\n")); }},
      {"pts: bad header", [&] { io::read_points(write("c.pts", "n_points: 1\n{\n1 2\n}\n")); }},
      {"pts: missing brace", [&] { io::read_points(write("d.pts", "version: 1\nn_points: 1\n{\n1 2\n")); }},
      {"pgm: bad magic", [&] { io::read_pgm(write("a.pgm", "P6\n1 1\n255\n\x01\x02\x03"), 0.2); }},
      {"pgm: truncated raster", [&] { io::read_pgm(write("b.pgm", "P5\n4 4\n255\n\x01\x02"), 0.2); }},
      {"pgm: maxval 1024", [&] { io::read_pgm(write("c.pgm", std::string("P5\n1 1\n1024\n\x00\x01", 15)), 0.2); }},
      {"pgm: zero width", [&] { io::read_pgm(write("d.pgm", "P5\n0 4\n255\n"), 0.2); }},
      {"pgm: trailing bytes", [&] { io::read_pgm(write("e.pgm", "P5\n1 1\n255\n\x01\x02"), 0.2); }},
      {"manifest: no header", [&] { io::read_manifest(write("a.csv", "a.pgm,a.pts,k,s,L,0,0.2\n")); }},
      {"manifest: short row", [&] { io::read_manifest(write("b.csv", header + "\na.pgm,a.pts,k,s,L\n")); }},
      {"manifest: bad KL", [&] { io::read_manifest(write("c.csv", header + "\na.pgm,a.pts,k,s,L,7,0.2\n")); }},
      {"manifest: duplicate id",
       [&] { io::read_manifest(write("d.csv", header + "\na,b,k,s,L,0,0.2\nc,d,k,t,R,1,0.2\n")); }},
      {"manifest: missing files",
       [&] { io::load_dataset(write("e.csv", header + "\nnone.pgm,none.pts,k,s,L,0,0.2\n"), io::Split::kTest, 0, 0.1); }},
      {"checkpoint: bad magic", [&] { io::load_checkpoint(write("a.oakn", mutate([](auto& b) { b[0] = 'Z'; }))); }},
      {"checkpoint: version + 1", [&] { io::load_checkpoint(write("b.oakn", mutate([](auto& b) { b[4] += 1; }))); }},
      {"checkpoint: flipped byte",
       [&] { io::load_checkpoint(write("c.oakn", mutate([](auto& b) { b[b.size() / 2] ^= 0x10; }))); }},
      {"checkpoint: truncated",
       [&] { io::load_checkpoint(write("d.oakn", mutate([](auto& b) { b.resize(b.size() - 9); }))); }},
      {"checkpoint: empty", [&] { io::load_checkpoint(write("e.oakn", "")); }},
  };
  std::size_t typed = 0;
  std::string failures;
  for (const auto& f : fixtures) {
    try {
      f.read();
      failures += " [" + f.name + ": accepted]";
    } catch (const oaknee::Error&) {
      ++typed;
    } catch (const std::exception& e) {
      failures += " [" + f.name + ": untyped " + e.what() + "]";
    }
  }
  fs::remove_all(dir);
  return {typed == fixtures.size() && fixtures.size() >= 12,
          fmt("%zu/%zu malformed .pts/PGM/manifest/checkpoint fixtures raised typed errors", typed, fixtures.size()) +
              failures};
}

}  // namespace

// Optional argument: comma list of criterion numbers to run (default all).
int main(int argc, char** argv) {
  std::vector<bool> selected(12, argc < 2);
  if (argc >= 2) {
    std::stringstream list(argv[1]);
    std::string item;
    while (std::getline(list, item, ',')) {
      const int id = std::atoi(item.c_str());
      if (id >= 1 && id <= 11) selected[id] = true;
    }
  }
  const auto t0 = Clock::now();
  std::printf("oaknee acceptance (worker threads: %zu)\n", worker_count());
  const std::vector<std::pair<int, std::pair<bool, std::string> (*)()>> standalone = {
      {1, descriptor_correctness}, {2, geometric_invariance}, {3, gradient_suite},
      {4, architecture_conformance}, {5, auc_oracle}};
  for (const auto& [id, fn] : standalone) {
    if (selected[id]) criterion(id, fn);
  }

  if (selected[6] || selected[7] || selected[8] || selected[9]) {
    Cohort cohort;
    bool have_cohort = false;
    try {
      cohort = build_cohort();
      have_cohort = true;
      std::printf("cohort: %zu train / %zu val / %zu test knees built in %.1f s\n", cohort.train.size(),
                  cohort.val.size(), cohort.test.size(), cohort.build_seconds);
    } catch (const std::exception& e) {
      std::printf("cohort construction failed: %s\n", e.what());
    }
    const std::vector<std::pair<int, std::pair<bool, std::string> (*)(const Cohort&)>> on_cohort = {
        {6, end_to_end}, {7, noise_robustness}, {8, density_calibration}, {9, importance_sanity}};
    for (const auto& [id, fn] : on_cohort) {
      if (!selected[id]) continue;
      if (!have_cohort) {
        report(id, false, "no cohort");
      } else {
        criterion(id, [&, fn = fn] { return fn(cohort); });
      }
    }
  }
  if (selected[10]) criterion(10, determinism);
  if (selected[11]) criterion(11, format_robustness);
  std::printf("%d criterion(s) failed; total %.0f s\n", g_failures, seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}
