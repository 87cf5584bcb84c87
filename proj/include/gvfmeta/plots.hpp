#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "gvfmeta/record.hpp"
#include "gvfmeta/svg.hpp"

namespace gvfmeta {

// Loads every *_summary.json under a records directory, in sorted order.
inline std::vector<Aggregate> load_aggregates(const std::string& records_dir) {
  std::vector<std::string> paths;
  for (const auto& entry : std::filesystem::directory_iterator(records_dir)) {
    const std::string p = entry.path().string();
    if (p.size() > 13 && p.substr(p.size() - 13) == "_summary.json") paths.push_back(p);
  }
  std::sort(paths.begin(), paths.end());
  std::vector<Aggregate> out;
  for (const std::string& p : paths) {
    std::ifstream in(p);
    nlohmann::json j;
    in >> j;
    out.push_back(aggregate_from_json(j));
  }
  return out;
}

namespace plot_detail {

const char* kPalette[] = {"#4878cf", "#e8a33d", "#333333", "#6aa84f", "#a64d79", "#45818e"};

// Grouped bars with standard-error whiskers.
inline std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                             const std::vector<double>& means, const std::vector<double>& sems,
                             const std::string& y_label, double y_max_hint = 0.0,
                             int highlight = -1) {
  const double w = 560, h = 360, ml = 60, mr = 20, mt = 40, mb = 50;
  SvgDoc svg(w, h);
  svg.text(w / 2, 22, title, 14, "middle");
  double y_max = y_max_hint;
  for (std::size_t i = 0; i < means.size(); ++i) y_max = std::max(y_max, means[i] + sems[i]);
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.1;
  const double plot_w = w - ml - mr, plot_h = h - mt - mb;
  const auto ypix = [&](double v) { return mt + plot_h * (1.0 - v / y_max); };
  svg.line(ml, mt, ml, mt + plot_h, "#000000");
  svg.line(ml, mt + plot_h, ml + plot_w, mt + plot_h, "#000000");
  for (int g = 0; g <= 4; ++g) {
    const double v = y_max * g / 4.0;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    svg.text(ml - 6, ypix(v) + 4, buf, 10, "end");
    svg.line(ml - 3, ypix(v), ml, ypix(v), "#000000");
  }
  svg.text(14, mt + plot_h / 2, y_label, 11, "middle");
  const double n = static_cast<double>(means.size());
  const double slot = plot_w / n;
  const double bw = slot * 0.6;
  for (std::size_t i = 0; i < means.size(); ++i) {
    const double cx = ml + slot * (static_cast<double>(i) + 0.5);
    const std::string fill = (static_cast<int>(i) == highlight)
                                 ? "#c0392b"
                                 : kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    const double top = ypix(std::max(means[i], 0.0));
    svg.rect(cx - bw / 2, top, bw, mt + plot_h - top, fill);
    if (sems[i] > 0.0) {
      svg.line(cx, ypix(means[i] + sems[i]), cx, ypix(std::max(means[i] - sems[i], 0.0)),
               "#000000");
      svg.line(cx - 4, ypix(means[i] + sems[i]), cx + 4, ypix(means[i] + sems[i]), "#000000");
      svg.line(cx - 4, ypix(std::max(means[i] - sems[i], 0.0)), cx + 4,
               ypix(std::max(means[i] - sems[i], 0.0)), "#000000");
    }
    svg.text(cx, mt + plot_h + 16, labels[i], 10, "middle");
  }
  return svg.str();
}

// Mean curve per series over logged steps.
inline std::string line_chart(const std::string& title,
                              const std::vector<std::string>& series_names,
                              const std::vector<std::vector<std::pair<double, double>>>& series,
                              const std::string& x_label, const std::string& y_label) {
  const double w = 640, h = 380, ml = 70, mr = 20, mt = 40, mb = 50;
  SvgDoc svg(w, h);
  svg.text(w / 2, 22, title, 14, "middle");
  double x_max = 1.0, y_max = 1.0, y_min = 0.0;
  for (const auto& s : series) {
    for (const auto& [x, y] : s) {
      x_max = std::max(x_max, x);
      y_max = std::max(y_max, y);
      y_min = std::min(y_min, y);
    }
  }
  y_max *= 1.05;
  if (y_min < 0.0) y_min *= 1.05;
  const double plot_w = w - ml - mr, plot_h = h - mt - mb;
  const auto xpix = [&](double v) { return ml + plot_w * (v / x_max); };
  const auto ypix = [&](double v) { return mt + plot_h * (1.0 - (v - y_min) / (y_max - y_min)); };
  svg.line(ml, mt, ml, mt + plot_h, "#000000");
  svg.line(ml, mt + plot_h, ml + plot_w, mt + plot_h, "#000000");
  for (int g = 0; g <= 4; ++g) {
    const double v = y_min + (y_max - y_min) * g / 4.0;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    svg.text(ml - 6, ypix(v) + 4, buf, 10, "end");
  }
  for (int g = 0; g <= 4; ++g) {
    const double v = x_max * g / 4.0;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    svg.text(xpix(v), mt + plot_h + 16, buf, 10, "middle");
  }
  svg.text(w / 2, h - 8, x_label, 11, "middle");
  svg.text(16, mt + plot_h / 2, y_label, 11, "middle");
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(series[i].size());
    for (const auto& [x, y] : series[i]) pts.emplace_back(xpix(x), ypix(y));
    const std::string color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    svg.polyline(pts, color);
    svg.text(ml + plot_w - 4, mt + 14 + 14 * static_cast<double>(i), series_names[i], 11, "end");
    svg.line(ml + plot_w - 70, mt + 10 + 14 * static_cast<double>(i), ml + plot_w - 56,
             mt + 10 + 14 * static_cast<double>(i), color, 2.0);
  }
  return svg.str();
}

inline std::string strip_prefix(const std::string& name, const std::string& prefix) {
  return name.size() > prefix.size() && name.compare(0, prefix.size(), prefix) == 0
             ? name.substr(prefix.size())
             : name;
}

}  // namespace plot_detail

// Renders the figure set from persisted records: reward bars per Monsoon
// variant, meta-weight trajectories, cumulative-reward curves and cumulant
// weight bars for Frost Hollow, plus a CSV of the aggregate table. Returns
// the written file paths; missing series are skipped with a warning.
inline std::vector<std::string> emit_plots(const std::string& records_dir,
                                           const std::string& out_dir,
                                           std::ostream& warnings = std::cerr) {
  const std::vector<Aggregate> aggs = load_aggregates(records_dir);
  std::vector<std::string> written;
  if (aggs.empty()) {
    warnings << "plot: no summaries found in " << records_dir << ", nothing to do\n";
    return written;
  }
  std::filesystem::create_directories(out_dir);

  const auto write_file = [&](const std::string& name, const std::string& content) {
    const std::string path = out_dir + "/" + name;
    std::ofstream out(path);
    out << content;
    written.push_back(path);
  };

  // Aggregate table as CSV.
  {
    std::ostringstream csv;
    csv << "experiment,n_seeds,mean_eval_reward,mean_eval_sem,cum_eval_reward,cum_eval_sem,"
           "success_rate\n";
    for (const Aggregate& a : aggs) {
      char buf[256];
      std::snprintf(buf, sizeof(buf), "%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", a.name.c_str(),
                    a.n_seeds, a.mean_eval_mean, a.mean_eval_sem, a.cum_eval_mean, a.cum_eval_sem,
                    a.success_rate);
      csv << buf;
    }
    write_file("summary.csv", csv.str());
  }

  // Monsoon: mean eval reward per variant.
  {
    std::vector<std::string> labels;
    std::vector<double> means, sems;
    for (const Aggregate& a : aggs) {
      if (a.name.rfind("monsoon", 0) != 0) continue;
      labels.push_back(plot_detail::strip_prefix(a.name, "monsoon_"));
      means.push_back(a.mean_eval_mean);
      sems.push_back(a.mean_eval_sem);
    }
    if (!labels.empty()) {
      write_file("monsoon_reward.svg",
                 plot_detail::bar_chart("Monsoon World: mean reward, final 100 greedy steps",
                                        labels, means, sems, "reward/step", 1.0));
    } else {
      warnings << "plot: no monsoon summaries, reward bars skipped\n";
    }
  }

  // Frost Hollow: cumulative eval reward per variant.
  {
    std::vector<std::string> labels;
    std::vector<double> means, sems;
    for (const Aggregate& a : aggs) {
      if (a.name.rfind("frosthollow", 0) != 0) continue;
      labels.push_back(plot_detail::strip_prefix(a.name, "frosthollow_"));
      means.push_back(a.cum_eval_mean);
      sems.push_back(a.cum_eval_sem);
    }
    if (!labels.empty()) {
      write_file("frosthollow_eval_reward.svg",
                 plot_detail::bar_chart("Frost Hollow: cumulative reward, final 1000 eval steps",
                                        labels, means, sems, "cumulative reward"));
    } else {
      warnings << "plot: no frost hollow summaries, eval bars skipped\n";
    }
  }

  // Frost Hollow: cumulative reward curves over training (per variant mean).
  {
    std::vector<std::string> names;
    std::vector<std::vector<std::pair<double, double>>> series;
    for (const Aggregate& a : aggs) {
      if (a.name.rfind("frosthollow", 0) != 0) continue;
      // Mean of cum_reward across seeds at each logged step.
      std::map<long long, std::pair<double, int>> acc;
      for (const SeedSummary& s : a.seeds) {
        if (s.aborted) continue;
        const std::string path = record_path(records_dir, a.name, s.seed);
        if (!std::filesystem::exists(path)) continue;
        for (const StepRow& row : read_record_file(path)) {
          auto& slot = acc[row.t];
          slot.first += row.cum_reward;
          slot.second += 1;
        }
      }
      std::vector<std::pair<double, double>> curve;
      for (const auto& [t, sum_n] : acc) {
        if (sum_n.second == 0) continue;
        curve.emplace_back(static_cast<double>(t), sum_n.first / sum_n.second);
      }
      if (!curve.empty()) {
        names.push_back(plot_detail::strip_prefix(a.name, "frosthollow_"));
        series.push_back(std::move(curve));
      }
    }
    if (!series.empty()) {
      write_file("frosthollow_cumulative.svg",
                 plot_detail::line_chart("Frost Hollow: mean cumulative reward", names, series,
                                         "step", "cumulative reward"));
    } else {
      warnings << "plot: no frost hollow records, cumulative curves skipped\n";
    }
  }

  // Frost Hollow: cumulant weights averaged over the run, successful seeds.
  for (const Aggregate& a : aggs) {
    if (a.name.rfind("frosthollow", 0) != 0) continue;
    FeatureVector mean;
    int n = 0;
    for (const SeedSummary& s : a.seeds) {
      if (s.aborted || !s.success || s.mean_abs_omega_c.empty()) continue;
      const FeatureVector& w = s.mean_abs_omega_c[0];
      if (w.empty()) continue;
      if (mean.empty()) mean.assign(w.size(), 0.0);
      for (std::size_t j = 0; j < w.size(); ++j) mean[j] += w[j];
      ++n;
    }
    if (n == 0) continue;
    for (double& x : mean) x /= n;
    std::vector<std::string> labels;
    std::vector<double> sems(mean.size(), 0.0);
    for (std::size_t j = 0; j < mean.size(); ++j) labels.push_back("in" + std::to_string(j));
    const int hi = static_cast<int>(argmax(mean));
    write_file(a.name + "_cumulant_weights.svg",
               plot_detail::bar_chart("Cumulant meta-weights |omega_c|, run average (" + a.name +
                                          ")",
                                      labels, mean, sems, "|omega_c|", 0.0, hi));
  }

  // Monsoon MGD: meta-weight trajectories (mean across seeds).
  for (const Aggregate& a : aggs) {
    if (a.name.rfind("monsoon", 0) != 0) continue;
    std::map<long long, std::pair<std::vector<double>, int>> acc;  // t -> (flat omegas, n)
    std::size_t flat_dim = 0;
    std::vector<std::string> names;
    for (const SeedSummary& s : a.seeds) {
      if (s.aborted) continue;
      const std::string path = record_path(records_dir, a.name, s.seed);
      if (!std::filesystem::exists(path)) continue;
      for (const StepRow& row : read_record_file(path)) {
        if (!row.has_meta) continue;
        std::vector<double> flat;
        for (const auto& w : row.omega_c) flat.insert(flat.end(), w.begin(), w.end());
        for (const auto& w : row.omega_pi) flat.insert(flat.end(), w.begin(), w.end());
        if (flat.empty()) continue;
        if (names.empty()) {
          for (std::size_t g = 0; g < row.omega_c.size(); ++g) {
            for (std::size_t j = 0; j < row.omega_c[g].size(); ++j) {
              names.push_back("wc" + std::to_string(g) + "_" + std::to_string(j));
            }
          }
          for (std::size_t g = 0; g < row.omega_pi.size(); ++g) {
            for (std::size_t j = 0; j < row.omega_pi[g].size(); ++j) {
              names.push_back("wpi" + std::to_string(g) + "_" + std::to_string(j));
            }
          }
          flat_dim = flat.size();
        }
        if (flat.size() != flat_dim) continue;
        auto& slot = acc[row.t];
        if (slot.first.empty()) slot.first.assign(flat_dim, 0.0);
        for (std::size_t j = 0; j < flat_dim; ++j) slot.first[j] += flat[j];
        slot.second += 1;
      }
    }
    if (acc.empty()) continue;
    std::vector<std::vector<std::pair<double, double>>> series(flat_dim);
    for (const auto& [t, slot] : acc) {
      for (std::size_t j = 0; j < flat_dim; ++j) {
        series[j].emplace_back(static_cast<double>(t), slot.first[j] / slot.second);
      }
    }
    write_file(a.name + "_meta_weights.svg",
               plot_detail::line_chart("Meta-weights over training (" + a.name + ", seed mean)",
                                       names, series, "step", "weight"));
  }

  return written;
}

}  // namespace gvfmeta
