#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oaknee/error.hpp"
#include "oaknee/eval/forest.hpp"
#include "oaknee/eval/robustness.hpp"
#include "oaknee/eval/roc.hpp"
#include "oaknee/eval/stats.hpp"

using namespace oaknee;
using namespace oaknee::eval;

namespace {

double pairwise_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

// Random instance with both classes and deliberate ties.
void random_instance(Rng& rng, std::vector<double>& s, std::vector<int>& y) {
  std::uniform_int_distribution<int> size(2, 50);
  std::uniform_int_distribution<int> level(0, 9);
  std::bernoulli_distribution coin(0.5);
  const int n = size(rng);
  s.clear();
  y.clear();
  for (int i = 0; i < n; ++i) {
    s.push_back(coin(rng) ? level(rng) / 10.0 : std::uniform_real_distribution<double>(0, 1)(rng));
    y.push_back(coin(rng));
  }
  y[0] = 0;
  y[1] = 1;
}

models::Dataset js2_dataset(std::size_t n, double shift, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  models::Dataset d;
  for (int j = 0; j < 6; ++j) d.feature_names.push_back("js2_" + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) {
    models::Sample s;
    s.knee_id = s.subject_id = "k" + std::to_string(i);
    s.label = static_cast<int>(i % 2);
    for (int j = 0; j < 6; ++j) s.features.push_back(20.0 + g(rng) - (s.label ? shift : 0.0));
    d.samples.push_back(std::move(s));
  }
  return d;
}

}  // namespace

TEST(RocAuc, Examples) {
  EXPECT_EQ(roc_auc(std::vector<double>{0.1, 0.2, 0.3, 0.4}, std::vector<int>{0, 0, 1, 1}).auc, 1.0);
  EXPECT_EQ(roc_auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, std::vector<int>{0, 1, 0, 1}).auc, 0.5);
  const auto r = roc_auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<int>{0, 0, 1, 1});
  EXPECT_EQ(r.auc, 0.75);
  EXPECT_EQ(r.n_pos, 2u);
  EXPECT_EQ(r.n_neg, 2u);
  EXPECT_EQ(r.u_statistic, 3.0);
}

TEST(RocAuc, CurveEndpointsAndTrapezoid) {
  Rng rng(3);
  std::vector<double> s;
  std::vector<int> y;
  for (int k = 0; k < 50; ++k) {
    random_instance(rng, s, y);
    const auto r = roc_auc(s, y);
    ASSERT_GE(r.curve.size(), 2u);
    EXPECT_EQ(r.curve.front().fpr, 0.0);
    EXPECT_EQ(r.curve.front().tpr, 0.0);
    EXPECT_EQ(r.curve.back().fpr, 1.0);
    EXPECT_EQ(r.curve.back().tpr, 1.0);
    EXPECT_NEAR(trapezoid_area(r.curve), r.auc, 1e-9);
  }
}

TEST(RocAuc, MatchesPairwiseOracle) {
  Rng rng(2024);
  std::vector<double> s;
  std::vector<int> y;
  for (int k = 0; k < 200; ++k) {
    random_instance(rng, s, y);
    EXPECT_LT(std::abs(roc_auc(s, y).auc - pairwise_auc(s, y)), 1e-12);
  }
}

TEST(RocAuc, ComplementAndMonotoneInvariance) {
  Rng rng(77);
  std::vector<double> s;
  std::vector<int> y;
  for (int k = 0; k < 200; ++k) {
    random_instance(rng, s, y);
    std::vector<double> neg, mono;
    for (double v : s) {
      neg.push_back(-v);
      mono.push_back(std::exp(3.0 * v) + 2.0);
    }
    const double a = roc_auc(s, y).auc;
    EXPECT_EQ(a + roc_auc(neg, y).auc, 1.0);
    EXPECT_EQ(roc_auc(mono, y).auc, a);
  }
}

TEST(RocAuc, Errors) {
  EXPECT_THROW(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), DegenerateLabels);
  EXPECT_THROW(roc_auc(std::vector<double>{0.1}, std::vector<int>{0, 1}), InvalidArgument);
  EXPECT_THROW(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{0, 2}), InvalidArgument);
}

TEST(Forest, InformativeFeatureWins) {
  const std::size_t n = 100, d = 10;
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(derive_seed({seed, 42}));
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> x(n * d);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(i % 2);
      for (std::size_t j = 0; j < d; ++j) x[i * d + j] = g(rng);
      x[i * d + 3] = y[i];
    }
    ForestConfig cfg;
    cfg.seed = seed;
    const auto r = forest_importance(x, d, y, cfg);
    wins += r.ranking.front() == 3;
  }
  EXPECT_GE(wins, 95);
}

TEST(Forest, ConstantFeatureAndNormalization) {
  const std::size_t n = 60, d = 5;
  Rng rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(n * d);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(i % 3 == 0);
    for (std::size_t j = 0; j < d; ++j) x[i * d + j] = g(rng) + (j == 1 ? y[i] : 0.0);
    x[i * d + 2] = 4.0;
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ForestConfig cfg;
    cfg.seed = seed;
    cfg.n_trees = 30;
    const auto r = forest_importance(x, d, y, cfg);
    EXPECT_EQ(r.importance[2], 0.0);
    double sum = 0.0;
    for (double v : r.importance) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    ASSERT_EQ(r.ranking.size(), d);
    for (std::size_t k = 1; k < d; ++k) EXPECT_GE(r.importance[r.ranking[k - 1]], r.importance[r.ranking[k]]);
  }
}

TEST(Forest, SameSeedSameResult) {
  std::vector<double> x;
  std::vector<int> y;
  Rng rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    y.push_back(i % 2);
    for (int j = 0; j < 4; ++j) x.push_back(g(rng) + 0.5 * y.back() * j);
  }
  ForestConfig cfg;
  cfg.seed = 12;
  EXPECT_EQ(forest_importance(x, 4, y, cfg).importance, forest_importance(x, 4, y, cfg).importance);
}

TEST(Forest, Errors) {
  std::vector<double> x(20, 1.0);
  EXPECT_THROW(forest_importance(x, 2, std::vector<int>(10, 0)), DegenerateLabels);
  EXPECT_THROW(forest_importance(std::vector<double>(8, 0.0), 2, std::vector<int>{0, 1, 0, 1}), InvalidArgument);
}

TEST(Perturb, ZeroSigmaIsIdentity) {
  Rng rng(1);
  const std::vector<double> v{1.0, 0.0, 7.5};
  EXPECT_EQ(perturb_descriptor(v, 0.0, rng), v);
  EXPECT_THROW(perturb_descriptor(v, -1.0, rng), InvalidArgument);
}

TEST(Perturb, SampleStdMatchesSigma) {
  for (double sigma : {1.0, 3.0, 5.0}) {
    Rng rng(derive_seed({7, static_cast<std::uint64_t>(sigma)}));
    const std::vector<double> base(4, 100.0);
    std::vector<double> sum(4, 0.0), sq(4, 0.0);
    const int draws = 100000;
    for (int k = 0; k < draws; ++k) {
      const auto p = perturb_descriptor(base, sigma, rng);
      for (int j = 0; j < 4; ++j) {
        sum[j] += p[j] - 100.0;
        sq[j] += (p[j] - 100.0) * (p[j] - 100.0);
      }
    }
    for (int j = 0; j < 4; ++j) {
      const double mean = sum[j] / draws;
      const double sd = std::sqrt(sq[j] / draws - mean * mean);
      EXPECT_NEAR(sd, sigma, 0.02 * sigma);
    }
  }
}

TEST(Perturb, ClampsAtZero) {
  Rng rng(5);
  const std::vector<double> base(1000, 0.5);
  for (double v : perturb_descriptor(base, 5.0, rng)) EXPECT_GE(v, 0.0);
}

TEST(Perturb, OnlyJs2ColumnsChange) {
  models::Dataset d = js2_dataset(10, 1.0, 1);
  d.feature_names.push_back("fjsw_medial");
  for (auto& s : d.samples) s.features.push_back(3.0);
  Rng rng(2);
  const auto p = perturb_js2_columns(d, 1.0, rng);
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(p.samples[i].features.back(), 3.0);
    EXPECT_NE(p.samples[i].features.front(), d.samples[i].features.front());
  }
  models::Dataset none;
  none.feature_names = {"minjsw"};
  EXPECT_THROW(perturb_js2_columns(none, 1.0, rng), InvalidArgument);
}

TEST(NoiseSweep, ZeroSigmaIsPlainEvaluation) {
  const auto train = js2_dataset(80, 0.8, 1);
  const auto val = js2_dataset(40, 0.8, 2);
  const auto test = js2_dataset(60, 0.8, 3);
  NoiseSweepConfig cfg;
  cfg.sigmas = {0.0};
  cfg.models = {models::Arch::kLogistic};
  const auto rows = noise_sweep(train, val, test, cfg);
  ASSERT_EQ(rows.size(), 1u);
  const auto fitted = models::fit_model(models::Arch::kLogistic, train, val, cfg.train);
  EXPECT_EQ(rows[0].auc, roc_auc(models::predict_scores(fitted.model, test), test.labels()).auc);
  EXPECT_EQ(rows[0].model, "lr");
}

TEST(NoiseSweep, RowsAreSigmaMajorAndDegrade) {
  const auto train = js2_dataset(200, 0.8, 4);
  const auto val = js2_dataset(50, 0.8, 5);
  const auto test = js2_dataset(200, 0.8, 6);
  NoiseSweepConfig cfg;
  cfg.sigmas = {0.0, 5.0};
  cfg.models = {models::Arch::kLogistic, models::Arch::kJs2Net};
  cfg.train.epochs = 3;
  const auto rows = noise_sweep(train, val, test, cfg);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].sigma_mm, 0.0);
  EXPECT_EQ(rows[1].model, "js2-nn");
  EXPECT_EQ(rows[2].sigma_mm, 5.0);
  EXPECT_GT(rows[0].auc, rows[2].auc);
  EXPECT_EQ(noise_sweep(train, val, test, cfg)[3].auc, rows[3].auc);
  cfg.sigmas = {-1.0};
  EXPECT_THROW(noise_sweep(train, val, test, cfg), InvalidArgument);
}

TEST(NoiseSweep, JobSeedsAreDistinct) {
  EXPECT_NE(noise_job_seed(0, 1.0, "lr"), noise_job_seed(0, 3.0, "lr"));
  EXPECT_NE(noise_job_seed(0, 1.0, "lr"), noise_job_seed(0, 1.0, "js2-nn"));
  EXPECT_NE(noise_job_seed(0, 1.0, "lr"), noise_job_seed(1, 1.0, "lr"));
  EXPECT_EQ(noise_job_seed(5, 3.0, "combined"), noise_job_seed(5, 3.0, "combined"));
}

TEST(Density, MeansStdsAndNormalization) {
  const std::vector<double> v{1, 2, 3, 10, 12, 14, 16};
  const std::vector<int> y{0, 0, 0, 1, 1, 1, 1};
  const auto d = class_density_stats(v, y);
  EXPECT_EQ(d.classes[0].count, 3u);
  EXPECT_DOUBLE_EQ(d.classes[0].mean, 2.0);
  EXPECT_DOUBLE_EQ(d.classes[0].stddev, 1.0);
  EXPECT_DOUBLE_EQ(d.classes[1].mean, 13.0);
  EXPECT_NEAR(d.classes[1].stddev, std::sqrt(20.0 / 3.0), 1e-12);
  EXPECT_EQ(d.bin_centers.size(), kDensityBins);
  for (int c = 0; c < 2; ++c) {
    double integral = 0.0;
    for (double p : d.density[c]) integral += p * d.bin_width;
    EXPECT_NEAR(integral, 1.0, 1e-6);
  }
}

TEST(Density, SingleValueClassHasZeroStd) {
  const auto d = class_density_stats(std::vector<double>{4.0, 1.0, 2.0}, std::vector<int>{1, 0, 0});
  EXPECT_EQ(d.classes[1].stddev, 0.0);
  EXPECT_EQ(d.classes[1].mean, 4.0);
}

TEST(Density, Errors) {
  EXPECT_THROW(class_density_stats(std::vector<double>{1, 2}, std::vector<int>{0, 0}), DegenerateLabels);
  EXPECT_THROW(class_density_stats(std::vector<double>{1, 2}, std::vector<int>{0}), InvalidArgument);
}
