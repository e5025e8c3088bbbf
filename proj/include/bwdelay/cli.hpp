#pragma once

// Command layer behind the bwdelay tool: spectrum, total, sweep, exchange,
// model. Each command writes one CSV whose comment header carries the
// configuration fingerprint, plus optional JSON metadata.

#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bwdelay/config.hpp"
#include "bwdelay/errors.hpp"
#include "bwdelay/model.hpp"
#include "bwdelay/parallel.hpp"
#include "bwdelay/probability.hpp"
#include "bwdelay/sweep.hpp"

namespace bwdelay {

inline constexpr const char* tool_version = "0.1.0";

/// Column-major numeric table with '#' comment lines on top.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  void add(std::string name, std::vector<double> values) {
    header.push_back(std::move(name));
    columns.push_back(std::move(values));
  }

  std::string str() const {
    std::ostringstream os;
    for (const auto& c : comments) os << "# " << c << '\n';
    for (std::size_t j = 0; j < header.size(); ++j) os << (j ? "," : "") << header[j];
    os << '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < columns.size(); ++j) os << (j ? "," : "") << format_sig(columns[j][i]);
      os << '\n';
    }
    return os.str();
  }
};

struct RunOptions {
  double grid_scale = 1.0;
  int threads = 0;
  std::string out;        // CSV path; empty writes to the output stream
  std::string meta;       // JSON metadata path; empty skips it
  std::string histogram;  // model command only
  bool verify = false;    // spectrum: doubled-angle convergence check
};

enum class Command { spectrum, total, sweep, exchange, model };

inline std::optional<Command> parse_command(std::string_view s) {
  if (s == "spectrum") return Command::spectrum;
  if (s == "total") return Command::total;
  if (s == "sweep") return Command::sweep;
  if (s == "exchange") return Command::exchange;
  if (s == "model") return Command::model;
  return std::nullopt;
}

inline std::string to_string(Command c) {
  switch (c) {
    case Command::spectrum: return "spectrum";
    case Command::total: return "total";
    case Command::sweep: return "sweep";
    case Command::exchange: return "exchange";
    case Command::model: return "model";
  }
  return "unknown";
}

/// Exit status per error category.
inline int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::parse_error:
    case ErrorCategory::validation_error: return 2;
    case ErrorCategory::grid_unconverged:
    case ErrorCategory::quadrature_under_resolved: return 3;
    default: return 4;
  }
}

namespace detail {

inline std::string gap_label(double raw, DelayUnit unit) {
  return "dP_dp_double_D" + format_sig(raw, 6) + (unit == DelayUnit::pulse_length ? "L" : "");
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

inline std::string histogram_path(const RunOptions& opt, const RunConfig& cfg) {
  if (!opt.histogram.empty()) return opt.histogram;
  if (!cfg.output.histogram.empty()) return cfg.output.histogram;
  const std::string& out = opt.out.empty() ? cfg.output.csv : opt.out;
  if (out.empty()) return {};
  const auto dot = out.rfind('.');
  const auto slash = out.rfind('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? out.substr(0, dot) : out) + "_histogram.csv";
}

}  // namespace detail

struct RunReport {
  std::string fingerprint;
  std::size_t grid_nodes = 0;
  std::size_t closed_nodes = 0;
  std::size_t unresolved_nodes = 0;
  double build_seconds = 0.0;
};

/// Runs one command; returns the CSV text and fills `report`. Throws the
/// library errors unchanged.
inline std::string run_command(Command cmd, RunConfig cfg, const RunOptions& opt, RunReport& report) {
  if (!(opt.grid_scale > 0.0)) throw ValidationError("grid-scale", "must be > 0");
  cfg.grid = cfg.grid.scaled(opt.grid_scale);
  cfg.validate();
  const std::string fp = config_fingerprint(cfg);
  report.fingerprint = fp;
  const int threads = resolve_threads(opt.threads);
  const std::vector<double> gaps = cfg.delays();
  const std::vector<double> raw = cfg.delay.raw();
  const bool two = cfg.pulses.size() == 2;

  CsvTable t;
  t.comments.push_back(std::string("bwdelay ") + tool_version);
  t.comments.push_back("command=" + to_string(cmd) + " run=" + cfg.name + " fingerprint=" + fp);

  const auto build = [&](const DoublePulseConfig& dc) {
    const MomentumGrid grid(cfg.grid, dc.gamma);
    AmplitudeCache cache(dc, grid, {}, threads);
    report.grid_nodes = grid.nodes().size();
    report.closed_nodes = cache.closed_nodes();
    report.unresolved_nodes = cache.unresolved_nodes();
    report.build_seconds = cache.build_seconds();
    return cache;
  };
  const auto need_two = [&] {
    if (!two) throw ValidationError("pulses.count", to_string(cmd) + " needs two pulses");
  };

  switch (cmd) {
    case Command::spectrum: {
      if (opt.verify) energy_spectrum(cfg.pulse_config(two ? gaps.front() : 0.0), cfg.grid, {}, threads, true);
      const AmplitudeCache cache = build(cfg.pulse_config());
      t.add("p_over_m", cache.p_values());
      t.add("dP_dp_single", cache.spectrum(Channel::first_single()));
      if (two && !cache.shares_pulse()) t.add("dP_dp_single_second", cache.spectrum(Channel::second_single()));
      if (two)
        for (std::size_t i = 0; i < gaps.size(); ++i)
          t.add(detail::gap_label(raw[i], cfg.delay.unit), cache.spectrum(Channel::forward(gaps[i])));
      break;
    }
    case Command::total: {
      const AmplitudeCache cache = build(cfg.pulse_config());
      if (!two) {
        t.add("P_single", {cache.total(Channel::first_single())});
        break;
      }
      const RatioCurve c = sweep_delay(cache, gaps, PulseOrder::forward, threads);
      t.add("D_lambda_e", c.D_values);
      t.add("P_double", c.P_double);
      t.add("P_first_single", c.P_first_single);
      t.add("P_second_single", c.P_second_single);
      break;
    }
    case Command::sweep: {
      need_two();
      const AmplitudeCache cache = build(cfg.pulse_config());
      RatioCurve c = sweep_delay(cache, gaps, PulseOrder::forward, threads);
      c.fingerprint = fp;
      t.comments.push_back("mode=" + to_string(c.mode));
      t.add("D_lambda_e", c.D_values);
      t.add("ratio", c.ratio);
      t.add("P_double", c.P_double);
      t.add("P_first_single", c.P_first_single);
      t.add("P_second_single", c.P_second_single);
      break;
    }
    case Command::exchange: {
      need_two();
      const AmplitudeCache cache = build(cfg.pulse_config());
      const RatioCurve fwd = sweep_delay(cache, gaps, PulseOrder::forward, threads);
      const RatioCurve rev = sweep_delay(cache, gaps, PulseOrder::reversed, threads);
      std::vector<double> residual(gaps.size());
      for (std::size_t i = 0; i < gaps.size(); ++i) {
        const double sum = fwd.P_first_single[i] + fwd.P_second_single[i];
        residual[i] = sum > 0.0 ? std::abs(0.5 * (fwd.P_double[i] + rev.P_double[i]) - sum) / sum : 0.0;
      }
      t.add("D_lambda_e", gaps);
      t.add("ratio_forward", fwd.ratio);
      t.add("ratio_reversed", rev.ratio);
      t.add("P_forward", fwd.P_double);
      t.add("P_reversed", rev.P_double);
      t.add("P_first_single", fwd.P_first_single);
      t.add("P_second_single", fwd.P_second_single);
      t.add("order_sum_residual", residual);
      break;
    }
    case Command::model: {
      const AmplitudeCache cache = build(make_single_pulse(cfg.pulses.front().spec(), cfg.gamma()));
      const DressedEnergyStats st = dressed_energy_stats(cache);
      const double L = cfg.pulses.front().spec().length();
      const RatioCurve c = gaussian_ratio_model(st, L, gaps);
      std::vector<double> env;
      for (double D : gaps) env.push_back(gaussian_model_envelope(st, L, D));
      t.comments.push_back("mean_EL=" + format_sig(st.mean_EL) + " width_EL=" + format_sig(st.width_EL) +
                           " P_single=" + format_sig(st.total_weight) + " L=" + format_sig(L));
      t.add("D_lambda_e", c.D_values);
      t.add("ratio_model", c.ratio);
      t.add("envelope", env);
      const std::string hpath = detail::histogram_path(opt, cfg);
      if (!hpath.empty()) {
        CsvTable h;
        h.comments = t.comments;
        h.comments.push_back("overflow_weight=" + format_sig(st.overflow_weight));
        std::vector<double> centers, density;
        const auto& hist = st.histogram;
        for (std::size_t i = 0; i < hist.weights.size(); ++i) {
          centers.push_back(hist.center(i));
          density.push_back(hist.weights[i] / hist.bin_width());
        }
        h.add("E_L_over_m", centers);
        h.add("rho", density);
        h.add("weight", hist.weights);
        detail::write_text(hpath, h.str());
      }
      break;
    }
  }
  return t.str();
}

inline nlohmann::json run_metadata(Command cmd, const RunConfig& cfg, const RunOptions& opt, const RunReport& r,
                                   double wall_seconds) {
  nlohmann::json j;
  j["tool"] = "bwdelay";
  j["version"] = tool_version;
  j["command"] = to_string(cmd);
  j["fingerprint"] = r.fingerprint;
  j["config"] = serialize_config(cfg, false);
  const GridSpec g = cfg.grid.scaled(opt.grid_scale);
  j["grid"] = {{"p_nodes", g.p_nodes},       {"theta_nodes", g.theta_nodes},
               {"phi_nodes", g.phi_nodes},   {"p_max", g.p_max},
               {"mirror_azimuth", g.mirror_azimuth}, {"evaluated_nodes", r.grid_nodes},
               {"closed_nodes", r.closed_nodes},     {"unresolved_nodes", r.unresolved_nodes}};
  j["threads"] = resolve_threads(opt.threads);
  j["cache_build_seconds"] = r.build_seconds;
  j["wall_seconds"] = wall_seconds;
  return j;
}

/// Full command: run, write outputs, report errors as
/// "bwdelay: error: <Category>: <message>" and return the exit status.
inline int run(Command cmd, const RunConfig& cfg, const RunOptions& opt, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  try {
    RunReport report;
    const std::string csv = run_command(cmd, cfg, opt, report);
    const std::string path = opt.out.empty() ? cfg.output.csv : opt.out;
    if (path.empty()) out << csv;
    else detail::write_text(path, csv);
    const std::string meta = opt.meta.empty() ? cfg.output.meta : opt.meta;
    if (!meta.empty()) {
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      detail::write_text(meta, run_metadata(cmd, cfg, opt, report, wall).dump(2) + "\n");
    }
    return 0;
  } catch (const Error& e) {
    err << "bwdelay: error: " << to_string(e.category()) << ": " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    err << "bwdelay: error: IOError: " << e.what() << '\n';
    return 5;
  }
}

}  // namespace bwdelay
