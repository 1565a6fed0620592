#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oaknee/error.hpp"
#include "oaknee/io/synth.hpp"
#include "oaknee/texture/texture.hpp"

using namespace oaknee;
using namespace oaknee::texture;
using imaging::BitDepth;
using imaging::RasterImage;

namespace {

RasterImage noise_patch(std::uint64_t seed, std::size_t side, int max = 255) {
  Rng rng(seed);
  std::uniform_int_distribution<int> u(0, max);
  RasterImage img(side, side, 0.2, BitDepth::k8);
  for (auto& v : img.pixels()) v = u(rng);
  return img;
}

RasterImage rot90(const RasterImage& img) {
  RasterImage out(img.height(), img.width(), img.spacing(), img.depth());
  for (std::size_t y = 0; y < img.height(); ++y)
    for (std::size_t x = 0; x < img.width(); ++x) out.at(y, img.width() - 1 - x) = img.at(x, y);
  return out;
}

// Naive riu2 reference: bilinear neighbours in double precision, bit set when
// the weighted difference to the centre is >= 0.
std::vector<double> naive_lbp(const RasterImage& img, int p, double r) {
  std::vector<double> hist(p + 2, 0.0);
  const int m = static_cast<int>(std::ceil(r));
  const int w = static_cast<int>(img.width()), h = static_cast<int>(img.height());
  int total = 0;
  for (int y = m; y < h - m; ++y) {
    for (int x = m; x < w - m; ++x) {
      const double c = img.at(x, y);
      std::vector<int> bits(p);
      for (int k = 0; k < p; ++k) {
        const double a = 2 * std::numbers::pi * k / p;
        double sx = x + r * std::cos(a), sy = y - r * std::sin(a);
        if (std::abs(sx - std::round(sx)) < 1e-9) sx = std::round(sx);
        if (std::abs(sy - std::round(sy)) < 1e-9) sy = std::round(sy);
        const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
        const double fx = sx - x0, fy = sy - y0;
        double diff = 0;
        for (int dy = 0; dy <= 1; ++dy) {
          for (int dx = 0; dx <= 1; ++dx) {
            const double wgt = (dx ? fx : 1 - fx) * (dy ? fy : 1 - fy);
            if (wgt == 0) continue;
            diff += wgt * (img.at(x0 + dx, y0 + dy) - c);
          }
        }
        bits[k] = diff >= 0;
      }
      int ones = 0, trans = 0;
      for (int k = 0; k < p; ++k) {
        ones += bits[k];
        trans += bits[k] != bits[(k + 1) % p];
      }
      hist[trans <= 2 ? ones : p + 1] += 1;
      ++total;
    }
  }
  for (auto& v : hist) v /= total;
  return hist;
}

RasterImage box_blur(const RasterImage& img) {
  RasterImage out = img;
  for (std::size_t y = 1; y + 1 < img.height(); ++y) {
    for (std::size_t x = 1; x + 1 < img.width(); ++x) {
      double s = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) s += img.at(x + dx, y + dy);
      out.at(x, y) = std::round(s / 9.0);
    }
  }
  return out;
}

// 256x256 fBm surface, min-max scaled to [0, 255] and quantized.
RasterImage fbm_patch(double hurst, std::uint64_t seed) {
  const auto surf = io::fractal_surface(8, hurst, seed);
  const std::size_t n = 257;
  double lo = 1e300, hi = -1e300;
  for (std::size_t y = 0; y < 256; ++y)
    for (std::size_t x = 0; x < 256; ++x) {
      lo = std::min(lo, surf[y * n + x]);
      hi = std::max(hi, surf[y * n + x]);
    }
  RasterImage img(256, 256, 0.2, BitDepth::k8);
  for (std::size_t y = 0; y < 256; ++y)
    for (std::size_t x = 0; x < 256; ++x) img.at(x, y) = std::round((surf[y * n + x] - lo) / (hi - lo) * 255.0);
  return img;
}

}  // namespace

TEST(Lbp, ConstantPatchAllInBinP) {
  const RasterImage img(20, 20, 0.2, BitDepth::k8, 77.0);
  const auto h = lbp_histogram(img);
  ASSERT_EQ(h.size(), 10u);
  for (std::size_t b = 0; b < h.size(); ++b) EXPECT_EQ(h[b], b == 8 ? 1.0 : 0.0);
}

TEST(Lbp, RotationByQuarterTurnIsExact) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto img = noise_patch(seed, 33);
    EXPECT_EQ(lbp_histogram(img), lbp_histogram(rot90(img)));
  }
}

TEST(Lbp, MatchesNaiveReference) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto img = noise_patch(100 + seed, 48);
    const auto h = lbp_histogram(img);
    const auto ref = naive_lbp(img, 8, 1.0);
    ASSERT_EQ(h.size(), ref.size());
    for (std::size_t b = 0; b < h.size(); ++b) EXPECT_DOUBLE_EQ(h[b], ref[b]) << b;
  }
}

TEST(Lbp, OtherRadiusMatchesReference) {
  const auto img = noise_patch(7, 40);
  const LbpConfig cfg{16, 2.0};
  const auto h = lbp_histogram(img, cfg);
  const auto ref = naive_lbp(img, 16, 2.0);
  for (std::size_t b = 0; b < h.size(); ++b) EXPECT_DOUBLE_EQ(h[b], ref[b]) << b;
}

TEST(Lbp, SumsToOne) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    double s = 0;
    for (double v : lbp_histogram(noise_patch(seed, 25))) s += v;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Lbp, MonotoneRemapInvariance) {
  const auto img = noise_patch(3, 30, 120);
  // Affine maps preserve every interpolated comparison.
  RasterImage affine = img;
  for (auto& v : affine.pixels()) v = 2 * v + 7;
  EXPECT_EQ(lbp_histogram(img), lbp_histogram(affine));
  // With axis-aligned neighbours only, any strictly increasing map works.
  RasterImage curved = img;
  for (auto& v : curved.pixels()) v = std::floor(v * v / 60.0) + v;
  const LbpConfig axis{4, 1.0};
  EXPECT_EQ(lbp_histogram(img, axis), lbp_histogram(curved, axis));
}

TEST(Lbp, Errors) {
  EXPECT_THROW(lbp_histogram(RasterImage(2, 2, 0.2, BitDepth::k8)), PatchTooSmall);
  EXPECT_THROW(lbp_histogram(noise_patch(0, 10), LbpConfig{3, 1.0}), InvalidArgument);
  EXPECT_THROW(lbp_histogram(noise_patch(0, 10), LbpConfig{8, 0.5}), InvalidArgument);
}

TEST(FractalDimension, ConstantIsTwo) {
  EXPECT_NEAR(fractal_dimension(RasterImage(64, 64, 0.2, BitDepth::k8, 120.0)), 2.0, 0.05);
  EXPECT_NEAR(fractal_dimension(RasterImage(56, 56, 0.2, BitDepth::k8, 0.0)), 2.0, 0.05);
}

TEST(FractalDimension, UniformNoiseRange) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const double fd = fractal_dimension(noise_patch(seed, 64));
    EXPECT_GE(fd, 2.6) << seed;
    EXPECT_LE(fd, 3.05) << seed;
  }
}

TEST(FractalDimension, FbmSurfaceTracksHurst) {
  // Box sizes from 1/16 to 1/2 of the side stay clear of the pixel-scale
  // quantization that biases the small-box counts.
  const std::vector<std::size_t> boxes{16, 32, 64, 128};
  for (double hurst : {0.3, 0.5, 0.7}) {
    double mean = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) mean += fractal_dimension(fbm_patch(hurst, seed), boxes) / 5;
    EXPECT_NEAR(mean, 3.0 - hurst, 0.15) << hurst;
  }
}

TEST(FractalDimension, RougherSurfaceHasHigherDimension) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EXPECT_GT(fractal_dimension(fbm_patch(0.3, seed)), fractal_dimension(fbm_patch(0.8, seed)));
  }
}

TEST(FractalDimension, OffsetInvariance) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto img = noise_patch(seed, 64, 200);
    RasterImage shifted = img;
    for (auto& v : shifted.pixels()) v += 37;
    EXPECT_NEAR(fractal_dimension(img), fractal_dimension(shifted), 0.01);
  }
}

TEST(FractalDimension, BlurLowersNoiseDimension) {
  int lower = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto img = noise_patch(1000 + seed, 64);
    lower += fractal_dimension(box_blur(img)) < fractal_dimension(img);
  }
  EXPECT_GE(lower, 95);
}

TEST(FractalDimension, InsufficientScales) {
  EXPECT_NO_THROW(fractal_dimension(noise_patch(0, 8)));
  EXPECT_THROW(fractal_dimension(noise_patch(0, 6)), InsufficientScales);
  EXPECT_THROW(fractal_dimension(noise_patch(0, 64), {2, 64, 100}), InsufficientScales);
}

TEST(TextureFeatures, Bundles) {
  const auto img = noise_patch(1, 48);
  const auto t = texture_features(img);
  EXPECT_EQ(t.lbp_hist, lbp_histogram(img));
  EXPECT_EQ(t.fd, fractal_dimension(img));
}
