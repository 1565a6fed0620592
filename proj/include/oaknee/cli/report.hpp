#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oaknee/eval/forest.hpp"
#include "oaknee/eval/robustness.hpp"
#include "oaknee/eval/roc.hpp"
#include "oaknee/eval/stats.hpp"
#include "oaknee/models/dataset.hpp"
#include "oaknee/models/train.hpp"

namespace oaknee::cli {

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

/// `knee_id,label,<feature names>` with one row per sample.
void write_feature_csv(const std::filesystem::path& path, const models::Dataset& data);
models::Dataset read_feature_csv(const std::filesystem::path& path);

void write_roc_csv(const std::filesystem::path& path, const eval::RocResult& roc);
void write_importance_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                          const eval::ImportanceReport& report);
void write_noise_sweep_csv(const std::filesystem::path& path, const std::vector<eval::NoiseSweepRow>& rows);
void write_density_csv(const std::filesystem::path& path, const eval::DensityStats& stats);
void write_history_csv(const std::filesystem::path& path, const std::vector<models::EpochRecord>& history);
void write_scores_csv(const std::filesystem::path& path, const models::Dataset& data,
                      const std::vector<double>& scores);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG line chart with axes, ticks and a legend.
std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series);
/// Horizontal bar chart, one bar per label in the given order.
std::string svg_bar_chart(const std::string& title, const std::vector<std::string>& labels,
                          const std::vector<double>& values);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace oaknee::cli
