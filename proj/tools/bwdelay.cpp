// bwdelay: pair creation by a gamma quantum in two consecutive laser pulses.
//
//   bwdelay sweep --preset fig3-blue --out ratio.csv
//   bwdelay spectrum --config run.cfg --grid-scale 2 --meta run.json
//   bwdelay config --preset fig4            # print the canonical config

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "bwdelay/cli.hpp"
#include "bwdelay/config.hpp"

namespace {

struct Source {
  std::string preset;
  std::string config;
  std::vector<std::string> overrides;
};

void add_source(CLI::App* sub, Source& src) {
  auto* p = sub->add_option("--preset", src.preset, "named run preset");
  auto* c = sub->add_option("--config", src.config, "key = value config file");
  p->excludes(c);
  sub->add_option("--set", src.overrides, "extra 'key=value' applied after the config")->take_all();
}

bwdelay::RunConfig resolve(const Source& src) {
  if (src.preset.empty() && src.config.empty()) throw bwdelay::ValidationError("config", "give --preset or --config");
  bwdelay::RunConfig cfg;
  if (!src.preset.empty()) {
    auto p = bwdelay::run_preset(src.preset);
    if (!p) throw bwdelay::ValidationError("preset", "unknown preset '" + src.preset + "'");
    cfg = *p;
  } else {
    cfg = bwdelay::load_config(src.config);
  }
  std::string extra;
  for (const auto& o : src.overrides) extra += o + "\n";
  if (!extra.empty()) cfg = bwdelay::parse_config(extra, cfg);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Breit-Wheeler pair creation in double laser pulses"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bwdelay::tool_version));

  Source src;
  bwdelay::RunOptions opt;
  const std::pair<const char*, const char*> commands[] = {
      {"spectrum", "dP/dp of the single pulse and of the double pulse per gap"},
      {"total", "total probabilities per gap"},
      {"sweep", "ratio R(D) of double to single-pulse totals"},
      {"exchange", "R(D) for both pulse orders and the order sum rule"},
      {"model", "Gaussian interference model from laser-dressed energy statistics"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_source(sub, src);
    sub->add_option("--out", opt.out, "CSV output path (default: stdout)");
    sub->add_option("--meta", opt.meta, "JSON metadata output path");
    sub->add_option("--grid-scale", opt.grid_scale, "multiplier on the grid node counts")->check(CLI::PositiveNumber);
    sub->add_option("--threads", opt.threads, "worker threads (default: BWDELAY_THREADS or all cores)");
    if (std::string(name) == "spectrum") sub->add_flag("--verify", opt.verify, "check angular convergence");
    if (std::string(name) == "model") sub->add_option("--histogram", opt.histogram, "E_L histogram CSV path");
  }
  auto* show = app.add_subcommand("config", "print the canonical configuration");
  add_source(show, src);
  auto* presets = app.add_subcommand("presets", "list run presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (presets->parsed()) {
    for (const auto& n : bwdelay::run_preset_names()) std::cout << n << '\n';
    return 0;
  }
  bwdelay::RunConfig cfg;
  try {
    cfg = resolve(src);
  } catch (const bwdelay::Error& e) {
    std::cerr << "bwdelay: error: " << bwdelay::to_string(e.category()) << ": " << e.what() << '\n';
    return bwdelay::exit_code(e.category());
  }
  if (show->parsed()) {
    std::cout << bwdelay::serialize_config(cfg);
    return 0;
  }
  const auto cmd = bwdelay::parse_command(app.get_subcommands().front()->get_name());
  return bwdelay::run(*cmd, cfg, opt, std::cout, std::cerr);
}
