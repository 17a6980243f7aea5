// SPDX-License-Identifier: Apache-2.0
#include "vlcsee/sweep.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace vlcsee {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string axis_dir_name(const std::string& axis, double value) {
  return axis.empty() ? std::string("point") : axis + "=" + fmt(value);
}

}  // namespace

std::vector<double> moving_average(const std::vector<double>& values, int window) {
  std::vector<double> out(values.size());
  double running = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    running += values[i];
    if (i >= static_cast<std::size_t>(window)) running -= values[i - window];
    const std::size_t n = std::min<std::size_t>(i + 1, static_cast<std::size_t>(window));
    out[i] = running / static_cast<double>(n);
  }
  return out;
}

void write_curve_csv(const std::string& path, const std::string& kind_label, std::uint64_t seed,
                     const std::string& hash, const std::vector<UpdateLogRow>& rows, int num_lus) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# kind=" << kind_label << " seed=" << seed << " config=" << hash << "\n";
  out << "step,update,phase,epoch,avg_reward,avg_see";
  for (int k = 1; k <= num_lus; ++k) out << ",r_lu_" << k;
  out << ",r_eve_common,r_eve_private,actor_loss,critic_loss,lr,"
         "viol_power,viol_common,viol_qos,viol_linear,smoothed_reward,smoothed_see\n";

  std::vector<double> rewards(rows.size()), sees(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rewards[i] = rows[i].avg_reward;
    sees[i] = rows[i].avg_see;
  }
  const std::vector<double> smoothed_reward = moving_average(rewards, 100);
  const std::vector<double> smoothed_see = moving_average(sees, 100);

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const UpdateLogRow& r = rows[i];
    out << r.step << "," << r.update << "," << r.phase << "," << r.epoch << ","
        << fmt(r.avg_reward) << "," << fmt(r.avg_see);
    for (int k = 0; k < num_lus; ++k) {
      out << "," << fmt(r.r_lu.size() > k ? r.r_lu(k) : 0.0);
    }
    out << "," << fmt(r.r_eve_common) << "," << fmt(r.r_eve_private) << "," << fmt(r.actor_loss)
        << "," << fmt(r.critic_loss) << "," << fmt(r.lr) << "," << r.viol_power << ","
        << r.viol_common << "," << r.viol_qos << "," << r.viol_linear << ","
        << fmt(smoothed_reward[i]) << "," << fmt(smoothed_see[i]) << "\n";
  }
}

void write_record_csv(const std::string& path, const RunRecord& record) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "config_hash,seed,baseline,final_smoothed_see,final_smoothed_reward";
  for (std::size_t k = 1; k <= record.final_r_lu.size(); ++k) out << ",r_lu_" << k;
  out << ",best_reward,wall_clock_s,version\n";
  out << record.config_hash << "," << record.seed << "," << record.baseline << ","
      << fmt(record.final_smoothed_see) << "," << fmt(record.final_smoothed_reward);
  for (double r : record.final_r_lu) out << "," << fmt(r);
  out << "," << fmt(record.best_reward) << "," << fmt(record.wall_clock_s) << ","
      << record.version << "\n";
}

namespace {

// Decisions are persisted with full precision so an offline recheck sees
// bitwise the values the environment scored.
std::string fmt_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_audit_csv(const std::string& path, const VlcEnv& env) {
  const auto& layout = env.action_layout();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "step,reward";
  for (int i = 0; i <= layout.num_lus; ++i) {
    for (int l = 1; l <= layout.num_leds; ++l) out << ",v_" << i << "_" << l;
  }
  for (int l = 1; l <= layout.num_leds; ++l) out << ",dc_" << l;
  for (int k = 1; k <= layout.num_lus; ++k) out << ",c_" << k;
  for (int n = 1; n <= layout.num_elements; ++n) out << ",align_" << n;
  out << "\n";
  for (const auto& rec : env.audit()) {
    out << rec.step << "," << fmt_exact(rec.reward);
    for (int i = 0; i < rec.decision.v.rows(); ++i) {
      for (int l = 0; l < rec.decision.v.cols(); ++l) out << "," << fmt_exact(rec.decision.v(i, l));
    }
    for (int l = 0; l < rec.decision.dc_bias.size(); ++l) {
      out << "," << fmt_exact(rec.decision.dc_bias(l));
    }
    for (int k = 0; k < rec.decision.c.size(); ++k) out << "," << fmt_exact(rec.decision.c(k));
    for (int n = 0; n < rec.alignment.num_elements(); ++n) {
      int column = 0;  // 0 = idle
      for (int p = 0; p < rec.alignment.q.cols(); ++p) {
        if (rec.alignment.q(n, p) != 0) column = p + 1;
      }
      out << "," << column;
    }
    out << "\n";
  }
}

}  // namespace

RunRecord run_cell(const CellSpec& cell) {
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(cell.dir);

  VlcEnv env(build_scene(cell.config, cell.seed), build_optics(cell.config),
             build_limits(cell.config), decode_options_for(cell.baseline));
  env.enable_audit(cell.config.audit);

  const TrainResult result = run_baseline(cell.baseline, env, cell.config.trainer, cell.seed);

  const std::string hash = config_hash(cell.config);
  const int num_lus = cell.config.scenario.k_lus;
  write_curve_csv(cell.dir + "/curve.csv", cell.baseline.label(), cell.seed, hash, result.rows,
                  num_lus);
  if (cell.config.audit) write_audit_csv(cell.dir + "/audit.csv", env);

  RunRecord record;
  record.config_hash = hash;
  record.seed = cell.seed;
  record.baseline = cell.baseline.label();

  std::vector<double> rewards(result.rows.size()), sees(result.rows.size());
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    rewards[i] = result.rows[i].avg_reward;
    sees[i] = result.rows[i].avg_see;
  }
  const auto sm_r = moving_average(rewards, 100);
  const auto sm_s = moving_average(sees, 100);
  record.final_smoothed_reward = sm_r.empty() ? 0.0 : sm_r.back();
  record.final_smoothed_see = sm_s.empty() ? 0.0 : sm_s.back();
  if (!result.rows.empty() && result.rows.back().r_lu.size() > 0) {
    std::vector<std::vector<double>> lu_series(static_cast<std::size_t>(num_lus));
    for (const auto& row : result.rows) {
      for (int k = 0; k < num_lus; ++k) {
        lu_series[static_cast<std::size_t>(k)].push_back(row.r_lu.size() > k ? row.r_lu(k) : 0.0);
      }
    }
    for (int k = 0; k < num_lus; ++k) {
      record.final_r_lu.push_back(moving_average(lu_series[static_cast<std::size_t>(k)], 100).back());
    }
  }
  record.best_reward = result.best_reward;
  record.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_record_csv(cell.dir + "/record.csv", record);
  return record;
}

namespace {

RunRecord read_record_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string header, data;
  std::getline(in, header);
  std::getline(in, data);
  std::vector<std::string> head_cols, cols;
  std::stringstream hs(header), ds(data);
  std::string tok;
  while (std::getline(hs, tok, ',')) head_cols.push_back(tok);
  while (std::getline(ds, tok, ',')) cols.push_back(tok);
  if (cols.size() != head_cols.size()) throw std::runtime_error("malformed record " + path);
  RunRecord r;
  for (std::size_t i = 0; i < head_cols.size(); ++i) {
    const std::string& name = head_cols[i];
    const std::string& v = cols[i];
    if (name == "config_hash") r.config_hash = v;
    else if (name == "seed") r.seed = std::stoull(v);
    else if (name == "baseline") r.baseline = v;
    else if (name == "final_smoothed_see") r.final_smoothed_see = std::stod(v);
    else if (name == "final_smoothed_reward") r.final_smoothed_reward = std::stod(v);
    else if (name.rfind("r_lu_", 0) == 0) r.final_r_lu.push_back(std::stod(v));
    else if (name == "best_reward") r.best_reward = std::stod(v);
    else if (name == "wall_clock_s") r.wall_clock_s = std::stod(v);
    else if (name == "version") r.version = v;
  }
  return r;
}

}  // namespace

std::vector<int> run_cells(const std::vector<CellSpec>& cells, int workers) {
  std::vector<int> exit_codes(cells.size(), -1);
  std::map<pid_t, std::size_t> running;
  std::size_t next = 0;
  const std::size_t limit = static_cast<std::size_t>(std::max(1, workers));
  while (next < cells.size() || !running.empty()) {
    while (next < cells.size() && running.size() < limit) {
      const pid_t pid = fork();
      if (pid < 0) throw std::runtime_error("run_cells: fork failed");
      if (pid == 0) {
        int code = 0;
        try {
          run_cell(cells[next]);
        } catch (const std::exception& e) {
          std::fprintf(stderr, "cell %s failed: %s\n", cells[next].dir.c_str(), e.what());
          code = 2;
        }
        _exit(code);
      }
      running[pid] = next;
      ++next;
    }
    if (!running.empty()) {
      int status = 0;
      const pid_t pid = waitpid(-1, &status, 0);
      if (pid > 0) {
        const auto it = running.find(pid);
        if (it != running.end()) {
          exit_codes[it->second] = WIFEXITED(status) ? WEXITSTATUS(status) : 2;
          running.erase(it);
        }
      }
    }
  }
  return exit_codes;
}

SweepOutcome run_sweep(const ExperimentConfig& config) {
  config.validate();
  std::vector<CellSpec> cells;
  std::vector<double> values = config.sweep.name.empty() ? std::vector<double>{0.0}
                                                         : config.sweep.values;
  for (double value : values) {
    ExperimentConfig cell_config =
        config.sweep.name.empty() ? config : with_axis_value(config, config.sweep.name, value);
    for (const auto& baseline : config.baselines) {
      for (std::uint64_t seed : config.seeds) {
        CellSpec cell;
        cell.config = cell_config;
        cell.baseline = baseline;
        cell.seed = seed;
        cell.axis_name = config.sweep.name;
        cell.axis_value = value;
        cell.dir = config.out_dir + "/" + axis_dir_name(config.sweep.name, value) + "/" +
                   baseline.label() + "/seed" + std::to_string(seed);
        cells.push_back(std::move(cell));
      }
    }
  }

  fs::create_directories(config.out_dir);
  const std::vector<int> exit_codes = run_cells(cells, config.workers);

  SweepOutcome outcome;
  std::ofstream failures(config.out_dir + "/failures.csv");
  failures << "axis,value,baseline,seed,exit_code\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (exit_codes[i] == 0) {
      outcome.records.push_back(read_record_csv(cells[i].dir + "/record.csv"));
    } else {
      ++outcome.failures;
      failures << cells[i].axis_name << "," << fmt(cells[i].axis_value) << ","
               << cells[i].baseline.label() << "," << cells[i].seed << "," << exit_codes[i] << "\n";
    }
  }

  // Summary: mean and standard deviation over seeds per (value, baseline).
  std::ofstream summary(config.out_dir + "/summary.csv");
  summary << "axis,value,baseline,n_seeds,mean_final_see,std_final_see,mean_final_reward,"
             "std_final_reward\n";
  for (double value : values) {
    for (const auto& baseline : config.baselines) {
      std::vector<double> see, reward;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (exit_codes[i] != 0) continue;
        if (cells[i].axis_value != value || cells[i].baseline.label() != baseline.label()) continue;
        const RunRecord rec = read_record_csv(cells[i].dir + "/record.csv");
        see.push_back(rec.final_smoothed_see);
        reward.push_back(rec.final_smoothed_reward);
      }
      if (see.empty()) continue;
      auto mean_of = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
      };
      auto std_of = [&](const std::vector<double>& v, double mean) {
        if (v.size() < 2) return 0.0;
        double s = 0;
        for (double x : v) s += (x - mean) * (x - mean);
        return std::sqrt(s / static_cast<double>(v.size() - 1));
      };
      const double mean_see = mean_of(see);
      const double mean_reward = mean_of(reward);
      summary << config.sweep.name << "," << fmt(value) << "," << baseline.label() << ","
              << see.size() << "," << fmt(mean_see) << "," << fmt(std_of(see, mean_see)) << ","
              << fmt(mean_reward) << "," << fmt(std_of(reward, mean_reward)) << "\n";
    }
  }
  return outcome;
}

namespace {

struct SummaryRow {
  std::string axis;
  double value = 0;
  std::string baseline;
  int n_seeds = 0;
  double mean_see = 0, std_see = 0, mean_reward = 0, std_reward = 0;
};

std::vector<SummaryRow> read_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    SummaryRow r;
    std::getline(ss, r.axis, ',');
    std::getline(ss, tok, ',');
    r.value = std::stod(tok);
    std::getline(ss, r.baseline, ',');
    std::getline(ss, tok, ',');
    r.n_seeds = std::stoi(tok);
    std::getline(ss, tok, ',');
    r.mean_see = std::stod(tok);
    std::getline(ss, tok, ',');
    r.std_see = std::stod(tok);
    std::getline(ss, tok, ',');
    r.mean_reward = std::stod(tok);
    std::getline(ss, tok, ',');
    r.std_reward = std::stod(tok);
    rows.push_back(std::move(r));
  }
  return rows;
}

const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                 "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
  return colors[i % 8];
}

void write_svg(const std::string& path, const std::string& axis,
               const std::vector<SummaryRow>& rows) {
  std::vector<std::string> baselines;
  std::vector<double> values;
  for (const auto& r : rows) {
    if (std::find(baselines.begin(), baselines.end(), r.baseline) == baselines.end()) {
      baselines.push_back(r.baseline);
    }
    if (std::find(values.begin(), values.end(), r.value) == values.end()) values.push_back(r.value);
  }
  std::sort(values.begin(), values.end());

  double lo = 0, hi = 1e-9;
  for (const auto& r : rows) {
    lo = std::min(lo, r.mean_see - r.std_see);
    hi = std::max(hi, r.mean_see + r.std_see);
  }
  if (hi <= lo) hi = lo + 1;
  const double x_min = values.front();
  const double x_max = values.back() > x_min ? values.back() : x_min + 1;

  const double width = 640, height = 420, ml = 70, mr = 160, mt = 30, mb = 50;
  auto sx = [&](double v) { return ml + (v - x_min) / (x_max - x_min) * (width - ml - mr); };
  auto sy = [&](double v) { return height - mb - (v - lo) / (hi - lo) * (height - mt - mb); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\""
      << height - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    out << "<text x=\"" << ml - 8 << "\" y=\"" << sy(v) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
    out << "<line x1=\"" << ml - 4 << "\" y1=\"" << sy(v) << "\" x2=\"" << ml << "\" y2=\"" << sy(v)
        << "\" stroke=\"black\"/>\n";
  }
  for (double v : values) {
    out << "<text x=\"" << sx(v) << "\" y=\"" << height - mb + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(v) << "</text>\n";
    out << "<line x1=\"" << sx(v) << "\" y1=\"" << height - mb << "\" x2=\"" << sx(v) << "\" y2=\""
        << height - mb + 4 << "\" stroke=\"black\"/>\n";
  }
  out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
      << "\" font-size=\"13\" text-anchor=\"middle\">" << (axis.empty() ? "point" : axis)
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (mt + height - mb) / 2 << ")\">final smoothed SEE</text>\n";

  for (std::size_t b = 0; b < baselines.size(); ++b) {
    std::ostringstream points;
    bool first = true;
    for (double v : values) {
      for (const auto& r : rows) {
        if (r.baseline != baselines[b] || r.value != v) continue;
        const double x = sx(v), y = sy(r.mean_see);
        if (r.std_see > 0) {
          out << "<line x1=\"" << x << "\" y1=\"" << sy(r.mean_see - r.std_see) << "\" x2=\"" << x
              << "\" y2=\"" << sy(r.mean_see + r.std_see) << "\" stroke=\"" << palette(b)
              << "\" stroke-width=\"1\"/>\n";
        }
        out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3\" fill=\"" << palette(b)
            << "\"/>\n";
        points << (first ? "" : " ") << x << "," << y;
        first = false;
      }
    }
    if (values.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << palette(b) << "\" stroke-width=\"1.5\" points=\""
          << points.str() << "\"/>\n";
    }
    const double ly = mt + 16.0 * static_cast<double>(b);
    out << "<rect x=\"" << width - mr + 10 << "\" y=\"" << ly << "\" width=\"12\" height=\"4\" fill=\""
        << palette(b) << "\"/>\n";
    out << "<text x=\"" << width - mr + 28 << "\" y=\"" << ly + 6 << "\" font-size=\"11\">"
        << baselines[b] << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

void emit_plot_data(const std::string& dir) {
  const std::string summary_path = dir + "/summary.csv";
  if (!fs::exists(summary_path)) {
    throw std::runtime_error("emit_plot_data: missing " + summary_path);
  }
  const std::vector<SummaryRow> rows = read_summary(summary_path);
  if (rows.empty()) throw std::runtime_error("emit_plot_data: empty summary " + summary_path);
  const std::string axis = rows.front().axis;

  std::vector<std::string> baselines;
  std::vector<double> values;
  for (const auto& r : rows) {
    if (std::find(baselines.begin(), baselines.end(), r.baseline) == baselines.end()) {
      baselines.push_back(r.baseline);
    }
    if (std::find(values.begin(), values.end(), r.value) == values.end()) values.push_back(r.value);
  }
  std::sort(values.begin(), values.end());

  const std::string stem = dir + "/plot_" + (axis.empty() ? "point" : axis);
  std::ofstream out(stem + ".csv");
  out << "value";
  for (const auto& b : baselines) out << "," << b << "_mean_see," << b << "_std_see";
  out << "\n";
  for (double v : values) {
    out << fmt(v);
    for (const auto& b : baselines) {
      double mean = 0, sd = 0;
      for (const auto& r : rows) {
        if (r.baseline == b && r.value == v) {
          mean = r.mean_see;
          sd = r.std_see;
        }
      }
      out << "," << fmt(mean) << "," << fmt(sd);
    }
    out << "\n";
  }
  write_svg(stem + ".svg", axis, rows);
}

}  // namespace vlcsee
