#include "oaknee/cli/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "oaknee/error.hpp"

namespace oaknee::cli {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

// Rounded tick step covering `span` with about five ticks.
double tick_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_text(const std::filesystem::path& path, const std::string& text) { open_out(path) << text; }

void write_feature_csv(const std::filesystem::path& path, const models::Dataset& data) {
  auto out = open_out(path);
  out << "knee_id,label";
  for (const auto& n : data.feature_names) out << ',' << n;
  out << '\n';
  for (const auto& s : data.samples) {
    out << s.knee_id << ',' << s.label;
    for (double v : s.features) out << ',' << format_number(v);
    out << '\n';
  }
}

models::Dataset read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  const std::string source = path.string();
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "knee_id" || header[1] != "label") {
    throw ParseError(source, 1, "header must start with knee_id,label and name at least one feature");
  }
  models::Dataset data;
  data.feature_names.assign(header.begin() + 2, header.end());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(header.size()) + " columns, got " + std::to_string(cells.size()));
    }
    models::Sample s;
    s.knee_id = cells[0];
    s.subject_id = cells[0];
    if (cells[1] != "0" && cells[1] != "1") throw ParseError(source, line_no, "label must be 0 or 1");
    s.label = cells[1] == "1" ? 1 : 0;
    for (std::size_t c = 2; c < cells.size(); ++c) {
      double v = 0.0;
      const auto& t = cells[c];
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw ParseError(source, line_no, "non-numeric value '" + t + "' in column " + header[c]);
      }
      s.features.push_back(v);
    }
    data.samples.push_back(std::move(s));
  }
  return data;
}

void write_roc_csv(const std::filesystem::path& path, const eval::RocResult& roc) {
  auto out = open_out(path);
  out << "threshold,fpr,tpr\n";
  for (const auto& p : roc.curve) {
    out << (std::isinf(p.threshold) ? std::string("inf") : format_number(p.threshold)) << ',' << format_number(p.fpr)
        << ',' << format_number(p.tpr) << '\n';
  }
}

void write_importance_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                          const eval::ImportanceReport& report) {
  std::vector<std::size_t> rank(names.size());
  for (std::size_t r = 0; r < report.ranking.size(); ++r) rank[report.ranking[r]] = r + 1;
  auto out = open_out(path);
  out << "feature,importance,rank\n";
  for (std::size_t j = 0; j < names.size(); ++j) {
    out << names[j] << ',' << format_number(report.importance[j]) << ',' << rank[j] << '\n';
  }
}

void write_noise_sweep_csv(const std::filesystem::path& path, const std::vector<eval::NoiseSweepRow>& rows) {
  auto out = open_out(path);
  out << "sigma_mm,model,auc\n";
  for (const auto& r : rows) out << format_number(r.sigma_mm) << ',' << r.model << ',' << format_number(r.auc) << '\n';
}

void write_density_csv(const std::filesystem::path& path, const eval::DensityStats& stats) {
  auto out = open_out(path);
  out << "bin_center,class0_density,class1_density\n";
  for (std::size_t b = 0; b < stats.bin_centers.size(); ++b) {
    out << format_number(stats.bin_centers[b]) << ',' << format_number(stats.density[0][b]) << ','
        << format_number(stats.density[1][b]) << '\n';
  }
}

void write_history_csv(const std::filesystem::path& path, const std::vector<models::EpochRecord>& history) {
  auto out = open_out(path);
  out << "epoch,lr,train_loss,val_auc\n";
  for (const auto& h : history) {
    out << h.epoch << ',' << format_number(h.lr) << ',' << format_number(h.train_loss) << ',' << format_number(h.val_auc)
        << '\n';
  }
}

void write_scores_csv(const std::filesystem::path& path, const models::Dataset& data,
                      const std::vector<double>& scores) {
  auto out = open_out(path);
  out << "knee_id,label,score\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.samples[i].knee_id << ',' << data.samples[i].label << ',' << format_number(scores[i]) << '\n';
  }
}

std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series) {
  constexpr double W = 640, H = 420, L = 70, R = 150, T = 40, B = 55;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title)
    << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  const double xs = tick_step(x1 - x0), ys = tick_step(y1 - y0);
  for (double v = std::ceil(x0 / xs) * xs; v <= x1 + 1e-12; v += xs) {
    o << "<line x1=\"" << px(v) << "\" y1=\"" << H - B << "\" x2=\"" << px(v) << "\" y2=\"" << H - B + 5
      << "\" stroke=\"black\"/><text x=\"" << px(v) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
      << format_number(std::round(v / xs) * xs) << "</text>\n";
  }
  for (double v = std::ceil(y0 / ys) * ys; v <= y1 + 1e-12; v += ys) {
    o << "<line x1=\"" << L - 5 << "\" y1=\"" << py(v) << "\" x2=\"" << L << "\" y2=\"" << py(v)
      << "\" stroke=\"black\"/><text x=\"" << L - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">"
      << format_number(std::round(v / ys) * ys) << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << escape_xml(x_label)
    << "</text>\n";
  o << "<text transform=\"translate(18," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape_xml(y_label) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) o << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    o << "\"/>\n";
    const double ly = T + 10 + 18.0 * static_cast<double>(k);
    o << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 32 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\"" << W - R + 38 << "\" y=\"" << ly + 4 << "\">"
      << escape_xml(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string svg_bar_chart(const std::string& title, const std::vector<std::string>& labels,
                          const std::vector<double>& values) {
  constexpr double W = 640, L = 110, R = 30, T = 40, row = 16;
  const double H = T + row * static_cast<double>(labels.size()) + 20;
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, v);
  if (vmax <= 0) vmax = 1;
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title)
    << "</text>\n";
  for (std::size_t i = 0; i < labels.size() && i < values.size(); ++i) {
    const double y = T + row * static_cast<double>(i);
    o << "<text x=\"" << L - 6 << "\" y=\"" << y + 11 << "\" text-anchor=\"end\">" << escape_xml(labels[i])
      << "</text><rect x=\"" << L << "\" y=\"" << y + 2 << "\" width=\"" << values[i] / vmax * (W - L - R)
      << "\" height=\"" << row - 4 << "\" fill=\"" << kPalette[0] << "\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace oaknee::cli
