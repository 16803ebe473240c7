#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "clforge/errors.hpp"
#include "clforge/harness.hpp"

namespace clforge {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace

void plot_csv(const std::string& csv_path, const std::string& recipe,
              const std::string& out_path) {
  std::ifstream in(csv_path);
  if (!in) throw SchemaMismatch("cannot open results csv: " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaMismatch(csv_path + ": empty file");
  const std::vector<std::string> header = split_csv_line(line);
  auto col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw SchemaMismatch(csv_path + ": missing required column \"" + name + "\"");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_run = col("run_id"), c_phase = col("phase_task"), c_iter = col("iter"),
                    c_task = col("eval_task"), c_split = col("split"), c_err = col("err");
  (void)c_phase;
  col("seed");
  col("loss");

  // (cell, eval_task) -> iter -> per-seed errors; cell = run_id before "_s"
  std::map<std::pair<std::string, int>, std::map<long, std::vector<double>>> series;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() < header.size()) throw SchemaMismatch(csv_path + ": short row: " + line);
    if (f[c_split] != "test") continue;
    std::string cell = f[c_run];
    if (const auto pos = cell.rfind("_s"); pos != std::string::npos) cell = cell.substr(0, pos);
    series[{cell, std::stoi(f[c_task])}][std::stol(f[c_iter])].push_back(std::stod(f[c_err]));
  }
  if (series.empty()) throw SchemaMismatch(csv_path + ": no test-split rows to plot");

  std::set<std::string> cells;
  std::set<int> tasks;
  long max_iter = 1;
  double max_err = 0.0;
  for (const auto& [key, by_iter] : series) {
    cells.insert(key.first);
    tasks.insert(key.second);
    for (const auto& [iter, vals] : by_iter) {
      max_iter = std::max(max_iter, iter);
      for (double v : vals) max_err = std::max(max_err, v);
    }
  }
  const double y_max = std::max(0.05, max_err * 1.05);

  const int pw = 360, ph = 240, ml = 56, mt = 40, mb = 44, gap = 24;
  const int width = ml + static_cast<int>(cells.size()) * (pw + gap);
  const int height = mt + ph + mb;
  auto sx = [&](int panel, double it) {
    return ml + panel * (pw + gap) + it / static_cast<double>(max_iter) * pw;
  };
  auto sy = [&](double e) { return mt + ph - e / y_max * ph; };

  std::ofstream svg(out_path);
  if (!svg) throw SchemaMismatch("cannot write plot: " + out_path);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<text x=\"" << ml << "\" y=\"18\" font-size=\"14\">" << recipe
      << ": median test error (IQR band) vs iteration</text>\n";

  int panel = 0;
  for (const std::string& cell : cells) {
    const double x0 = sx(panel, 0), x1 = sx(panel, static_cast<double>(max_iter));
    svg << "<rect x=\"" << x0 << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"#888\"/>\n";
    svg << "<text x=\"" << x0 << "\" y=\"" << mt - 6 << "\">" << cell << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
      const double e = y_max * i / 4.0;
      svg << "<text x=\"" << x0 - 50 << "\" y=\"" << sy(e) + 4 << "\">" << std::round(e * 1000) / 1000.0
          << "</text>\n";
      const double it = max_iter * i / 4.0;
      svg << "<text x=\"" << sx(panel, it) - 8 << "\" y=\"" << mt + ph + 16 << "\">"
          << static_cast<long>(it) << "</text>\n";
    }
    int ci = 0;
    for (int task : tasks) {
      const auto it = series.find({cell, task});
      if (it == series.end()) {
        ++ci;
        continue;
      }
      const char* color = kPalette[ci % 6];
      std::ostringstream med, band_hi, band_lo;
      for (const auto& [iter, vals] : it->second) {
        med << sx(panel, static_cast<double>(iter)) << ',' << sy(quantile(vals, 0.5)) << ' ';
        band_hi << sx(panel, static_cast<double>(iter)) << ',' << sy(quantile(vals, 0.75)) << ' ';
      }
      for (auto rit = it->second.rbegin(); rit != it->second.rend(); ++rit) {
        band_lo << sx(panel, static_cast<double>(rit->first)) << ','
                << sy(quantile(rit->second, 0.25)) << ' ';
      }
      svg << "<polygon points=\"" << band_hi.str() << band_lo.str() << "\" fill=\"" << color
          << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
      svg << "<polyline points=\"" << med.str() << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\"/>\n";
      if (panel == 0) {
        svg << "<text x=\"" << x1 - 70 << "\" y=\"" << mt + 14 + 13 * ci << "\" fill=\"" << color
            << "\">task " << task << "</text>\n";
      }
      ++ci;
    }
    svg << "<text x=\"" << (x0 + x1) / 2 - 30 << "\" y=\"" << mt + ph + 32
        << "\">iteration</text>\n";
    ++panel;
  }
  svg << "</svg>\n";
}

}  // namespace clforge
