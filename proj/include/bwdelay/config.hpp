#pragma once

// Run configuration: flat "section.key = value" text, named presets and a
// canonical serialization that round-trips exactly.
//
//   preset = fig4            # optional, resets everything to a preset
//   gamma.omega = 1.01
//   pulses.count = 2
//   pulse1.preset = A        # optional, then individual overrides
//   pulse2.xi = 0.2
//   pulse2.cep = 0.5         # units of pi
//   delay.start = 0
//   delay.stop = 15
//   delay.step = 0.1         # or delay.values = 0, 0.75, 2
//   delay.unit = lambda_e    # or pulse_length (multiples of L1)
//   grid.p_nodes = 200
//
// Lines starting with '#' and blank lines are ignored.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bwdelay/constants.hpp"
#include "bwdelay/double_pulse.hpp"
#include "bwdelay/errors.hpp"
#include "bwdelay/probability.hpp"

namespace bwdelay {

struct PulseEntry {
  double xi = 0.1;
  double omega = 1.01;
  int cycles = 4;
  double cep_pi = 0.0;  // carrier-envelope phase in units of pi

  friend bool operator==(const PulseEntry&, const PulseEntry&) = default;

  PulseSpec spec() const { return PulseSpec{xi, omega, cycles, cep_pi * pi, 0.0}; }
};

enum class DelayUnit { lambda_e, pulse_length };

struct DelaySpec {
  /// Explicit gaps; when empty the range start:step:stop is used.
  std::vector<double> values;
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
  DelayUnit unit = DelayUnit::lambda_e;

  friend bool operator==(const DelaySpec&, const DelaySpec&) = default;

  bool is_range() const { return values.empty(); }

  /// Gaps in the configured unit; the range includes stop up to rounding.
  std::vector<double> raw() const {
    if (!is_range()) return values;
    std::vector<double> out;
    if (step <= 0.0) {
      out.push_back(start);
      return out;
    }
    const auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
};

struct OutputSpec {
  std::string csv;
  std::string meta;
  std::string histogram;

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct RunConfig {
  std::string name = "custom";
  double gamma_omega = 1.01;
  std::vector<PulseEntry> pulses{PulseEntry{}};
  DelaySpec delay;
  GridSpec grid;
  OutputSpec output;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  double max_xi() const {
    double m = 0.0;
    for (const auto& p : pulses) m = std::max(m, p.xi);
    return m;
  }

  GammaProbe gamma() const { return GammaProbe{gamma_omega}; }

  /// Gaps in units of lambda_e.
  std::vector<double> delays() const {
    std::vector<double> d = delay.raw();
    if (delay.unit == DelayUnit::pulse_length) {
      const double L = pulses.front().spec().length();
      for (double& x : d) x *= L;
    }
    return d;
  }

  DoublePulseConfig pulse_config(double D = 0.0) const {
    DoublePulseConfig c;
    c.pulse_first = pulses.front().spec();
    if (pulses.size() > 1) c.pulse_second = pulses[1].spec();
    c.gap_D = D;
    c.gamma = gamma();
    return c.with_phase_shifts();
  }

  void validate() const {
    if (pulses.empty() || pulses.size() > 2) throw ValidationError("pulses.count", "must be 1 or 2");
    for (std::size_t i = 0; i < pulses.size(); ++i) pulses[i].spec().validate("pulse" + std::to_string(i + 1));
    if (!(gamma_omega > 0.0)) throw ValidationError("gamma.omega", "must be > 0");
    if (delay.is_range()) {
      if (delay.step < 0.0) throw ValidationError("delay.step", "must be >= 0");
      if (delay.stop < delay.start) throw ValidationError("delay.stop", "range is empty");
    }
    for (double d : delay.raw())
      if (!(d >= 0.0) || !std::isfinite(d)) throw ValidationError("delay", "gaps must be finite and >= 0");
    const GridSpec def;
    if (grid.p_nodes * 2 < def.p_nodes) throw ValidationError("grid.p_nodes", "below half the default");
    if (grid.theta_nodes * 2 < def.theta_nodes) throw ValidationError("grid.theta_nodes", "below half the default");
    if (grid.phi_nodes * 2 < def.phi_nodes) throw ValidationError("grid.phi_nodes", "below half the default");
    if (!(grid.p_max > 0.0)) throw ValidationError("grid.p_max", "must be > 0");
  }
};

// ---------------------------------------------------------------- presets

inline std::optional<PulseEntry> pulse_preset(std::string_view name) {
  if (name == "P1" || name == "A") return PulseEntry{0.1, 1.01, 4, 0.0};
  if (name == "P2") return PulseEntry{0.6, 0.3535, 4, 0.0};
  if (name == "B") return PulseEntry{0.2, 0.808, 3, 0.5};
  if (name == "B2") return PulseEntry{1.0, 0.35, 4, 0.25};
  return std::nullopt;
}

inline std::vector<std::string> run_preset_names() {
  return {"P1",        "P2",        "fig2",          "fig3-blue", "fig3-green", "fig3-xi1",
          "fig4",      "fig4-cep0", "fig4-cep-half", "fig5",      "fig5-xiA015", "fig5-cep-swap"};
}

namespace detail {

inline DelaySpec gap_range(double stop = 15.0, double step = 0.1) { return DelaySpec{{}, 0.0, stop, step, DelayUnit::lambda_e}; }

inline RunConfig pair_preset(std::string name, PulseEntry a, PulseEntry b) {
  RunConfig c;
  c.name = std::move(name);
  c.pulses = {a, b};
  c.delay = gap_range();
  return c;
}

}  // namespace detail

inline std::optional<RunConfig> run_preset(std::string_view name) {
  const PulseEntry P1 = *pulse_preset("P1");
  const PulseEntry P2 = *pulse_preset("P2");
  const PulseEntry A = *pulse_preset("A");
  const PulseEntry B = *pulse_preset("B");
  const PulseEntry B2 = *pulse_preset("B2");
  std::optional<RunConfig> c;
  if (name == "P1" || name == "P2") {
    c.emplace();
    c->name = std::string(name);
    c->pulses = {name == "P1" ? P1 : P2};
    c->delay = DelaySpec{{0.0}, 0.0, 0.0, 0.0, DelayUnit::lambda_e};
  } else if (name == "fig2") {
    c = detail::pair_preset("fig2", P1, P1);
    c->delay = DelaySpec{{0.0, 0.06, 0.13}, 0.0, 0.0, 0.0, DelayUnit::pulse_length};
  } else if (name == "fig3-blue") {
    c = detail::pair_preset("fig3-blue", P1, P1);
  } else if (name == "fig3-green") {
    c = detail::pair_preset("fig3-green", P2, P2);
  } else if (name == "fig3-xi1") {
    PulseEntry p = P2;
    p.xi = 1.0;
    c = detail::pair_preset("fig3-xi1", p, p);
  } else if (name == "fig4") {
    c = detail::pair_preset("fig4", A, B);
  } else if (name == "fig4-cep0") {
    PulseEntry b = B;
    b.cep_pi = 0.0;
    c = detail::pair_preset("fig4-cep0", A, b);
  } else if (name == "fig4-cep-half") {
    PulseEntry a = A;
    a.cep_pi = 0.5;
    c = detail::pair_preset("fig4-cep-half", a, B);
  } else if (name == "fig5") {
    c = detail::pair_preset("fig5", A, B2);
  } else if (name == "fig5-xiA015") {
    PulseEntry a = A;
    a.xi = 0.15;
    c = detail::pair_preset("fig5-xiA015", a, B2);
  } else if (name == "fig5-cep-swap") {
    PulseEntry a = A, b = B2;
    a.cep_pi = 0.25;
    b.cep_pi = 0.0;
    c = detail::pair_preset("fig5-cep-swap", a, b);
  }
  if (c) c->grid.p_max = default_p_max(c->max_xi());
  return c;
}

// ---------------------------------------------------------------- numbers

/// Shortest representation that parses back to the same double.
inline std::string format_exact(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

/// Fixed significant-digit formatting independent of the C locale.
inline std::string format_sig(double v, int digits = 9) {
  char buf[48];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  return std::string(buf, r.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view s, int line, const std::string& key) {
  s = trim(s);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty())
    throw ParseError(line, key, "expected a number, got '" + std::string(s) + "'");
  return v;
}

inline int parse_int(std::string_view s, int line, const std::string& key) {
  s = trim(s);
  int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty())
    throw ParseError(line, key, "expected an integer, got '" + std::string(s) + "'");
  return v;
}

inline bool parse_bool(std::string_view s, int line, const std::string& key) {
  s = trim(s);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ParseError(line, key, "expected true or false");
}

inline std::vector<double> parse_list(std::string_view s, int line, const std::string& key) {
  std::vector<double> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(parse_double(s.substr(0, comma), line, key));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------- parsing

/// Applies "key = value" lines to `base`. ParseError carries the line
/// number and key; semantic checks are left to RunConfig::validate.
inline RunConfig parse_config(std::string_view text, RunConfig base = {}) {
  RunConfig c = std::move(base);
  // p_max follows the pulses unless someone chose it explicitly
  bool p_max_set = c.grid.p_max != default_p_max(c.max_xi());
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "", "expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (value.empty()) throw ParseError(line_no, key, "missing value");

    if (key == "preset") {
      auto p = run_preset(value);
      if (!p) throw ParseError(line_no, key, "unknown preset '" + std::string(value) + "'");
      c = *p;
      p_max_set = false;
      continue;
    }
    if (key == "run.name") {
      c.name = std::string(value);
      continue;
    }
    if (key == "gamma.omega") {
      c.gamma_omega = detail::parse_double(value, line_no, key);
      continue;
    }
    if (key == "pulses.count") {
      const int n = detail::parse_int(value, line_no, key);
      if (n < 1 || n > 2) throw ParseError(line_no, key, "must be 1 or 2");
      c.pulses.resize(static_cast<std::size_t>(n), c.pulses.front());
      continue;
    }
    if (key.rfind("pulse", 0) == 0 && key.size() > 7 && key[6] == '.' && (key[5] == '1' || key[5] == '2')) {
      const std::size_t idx = key[5] == '1' ? 0 : 1;
      if (idx >= c.pulses.size()) c.pulses.resize(idx + 1, c.pulses.front());
      PulseEntry& p = c.pulses[idx];
      const std::string field = key.substr(7);
      if (field == "preset") {
        auto pp = pulse_preset(value);
        if (!pp) throw ParseError(line_no, key, "unknown pulse preset '" + std::string(value) + "'");
        p = *pp;
      } else if (field == "xi") {
        p.xi = detail::parse_double(value, line_no, key);
      } else if (field == "omega") {
        p.omega = detail::parse_double(value, line_no, key);
      } else if (field == "cycles") {
        p.cycles = detail::parse_int(value, line_no, key);
      } else if (field == "cep") {
        p.cep_pi = detail::parse_double(value, line_no, key);
      } else {
        throw ParseError(line_no, key, "unknown key");
      }
      continue;
    }
    if (key == "delay.values") {
      c.delay.values = detail::parse_list(value, line_no, key);
    } else if (key == "delay.start") {
      c.delay.start = detail::parse_double(value, line_no, key);
      c.delay.values.clear();
    } else if (key == "delay.stop") {
      c.delay.stop = detail::parse_double(value, line_no, key);
      c.delay.values.clear();
    } else if (key == "delay.step") {
      c.delay.step = detail::parse_double(value, line_no, key);
      c.delay.values.clear();
    } else if (key == "delay.unit") {
      if (value == "lambda_e") c.delay.unit = DelayUnit::lambda_e;
      else if (value == "pulse_length") c.delay.unit = DelayUnit::pulse_length;
      else throw ParseError(line_no, key, "expected lambda_e or pulse_length");
    } else if (key == "grid.p_nodes") {
      c.grid.p_nodes = detail::parse_int(value, line_no, key);
    } else if (key == "grid.theta_nodes") {
      c.grid.theta_nodes = detail::parse_int(value, line_no, key);
    } else if (key == "grid.phi_nodes") {
      c.grid.phi_nodes = detail::parse_int(value, line_no, key);
    } else if (key == "grid.p_max") {
      c.grid.p_max = detail::parse_double(value, line_no, key);
      p_max_set = true;
    } else if (key == "grid.mirror_azimuth") {
      c.grid.mirror_azimuth = detail::parse_bool(value, line_no, key);
    } else if (key == "output.csv") {
      c.output.csv = std::string(value);
    } else if (key == "output.meta") {
      c.output.meta = std::string(value);
    } else if (key == "output.histogram") {
      c.output.histogram = std::string(value);
    } else {
      throw ParseError(line_no, key, "unknown key");
    }
  }
  if (!p_max_set) c.grid.p_max = default_p_max(c.max_xi());
  return c;
}

/// Canonical text; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig& c, bool with_output = true) {
  std::ostringstream os;
  os << "run.name = " << c.name << '\n';
  os << "gamma.omega = " << format_exact(c.gamma_omega) << '\n';
  os << "pulses.count = " << c.pulses.size() << '\n';
  for (std::size_t i = 0; i < c.pulses.size(); ++i) {
    const auto& p = c.pulses[i];
    const std::string k = "pulse" + std::to_string(i + 1) + ".";
    os << k << "xi = " << format_exact(p.xi) << '\n';
    os << k << "omega = " << format_exact(p.omega) << '\n';
    os << k << "cycles = " << p.cycles << '\n';
    os << k << "cep = " << format_exact(p.cep_pi) << '\n';
  }
  if (c.delay.is_range()) {
    os << "delay.start = " << format_exact(c.delay.start) << '\n';
    os << "delay.stop = " << format_exact(c.delay.stop) << '\n';
    os << "delay.step = " << format_exact(c.delay.step) << '\n';
  } else {
    os << "delay.values = ";
    for (std::size_t i = 0; i < c.delay.values.size(); ++i) os << (i ? ", " : "") << format_exact(c.delay.values[i]);
    os << '\n';
  }
  os << "delay.unit = " << (c.delay.unit == DelayUnit::lambda_e ? "lambda_e" : "pulse_length") << '\n';
  os << "grid.p_nodes = " << c.grid.p_nodes << '\n';
  os << "grid.theta_nodes = " << c.grid.theta_nodes << '\n';
  os << "grid.phi_nodes = " << c.grid.phi_nodes << '\n';
  os << "grid.p_max = " << format_exact(c.grid.p_max) << '\n';
  os << "grid.mirror_azimuth = " << (c.grid.mirror_azimuth ? "true" : "false") << '\n';
  if (with_output) {
    if (!c.output.csv.empty()) os << "output.csv = " << c.output.csv << '\n';
    if (!c.output.meta.empty()) os << "output.meta = " << c.output.meta << '\n';
    if (!c.output.histogram.empty()) os << "output.histogram = " << c.output.histogram << '\n';
  }
  return os.str();
}

/// FNV-1a over the canonical text without output paths, as 16 hex digits.
inline std::string config_fingerprint(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(c, false)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[static_cast<std::size_t>(i)] = hex[h & 0xf];
  return s;
}

/// Preset name or path to a config file.
inline RunConfig load_config(const std::string& preset_or_path) {
  if (auto p = run_preset(preset_or_path)) return *p;
  std::ifstream in(preset_or_path);
  if (!in) throw ParseError(0, "", "no preset or readable file named '" + preset_or_path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c = parse_config(ss.str());
  c.validate();
  return c;
}

}  // namespace bwdelay
