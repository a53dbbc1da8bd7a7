#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ravflow/harness.hpp"
#include "ravflow/kernels.hpp"

namespace fs = std::filesystem;
using namespace ravflow;

namespace {

fs::path preset_dir() {
  if (const char* env = std::getenv("RAVFLOW_PRESET_DIR")) return env;
  return RAVFLOW_PRESET_DIR;
}

// A bare preset name (no extension, not an existing file) resolves to the
// shipped preset of that name.
fs::path resolve(const std::string& arg) {
  fs::path p(arg);
  if (fs::exists(p) || p.has_extension() || p.has_parent_path()) return p;
  return preset_dir() / (arg + ".toml");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(preset_dir(), ec)) {
    if (e.path().extension() == ".toml") names.push_back(e.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relaxed auxiliary variable gradient-flow solvers"};
  app.require_subcommand(1);

  std::string config_arg;
  std::optional<double> dt, t_end;
  std::optional<std::string> out_dir;

  auto* run = app.add_subcommand("run", "Run one simulation");
  run->add_option("config", config_arg, "config file or preset name")->required();
  run->add_option("--dt", dt, "override [time] dt");
  run->add_option("--t-end", t_end, "override [time] t_end");
  run->add_option("--out", out_dir, "override [output] output_dir");

  auto* converge = app.add_subcommand("converge", "Temporal convergence study over dt_list");
  converge->add_option("config", config_arg, "config file or preset name")->required();

  auto* compare = app.add_subcommand("compare", "RAV-CN against SAV-CN over dt_list");
  compare->add_option("config", config_arg, "config file or preset name")->required();

  app.add_subcommand("presets", "List shipped presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  kernels::set_thread_limit(harness_threads());

  if (app.got_subcommand("presets")) {
    for (const auto& name : preset_names()) std::cout << name << '\n';
    return kExitOk;
  }

  RunConfig cfg;
  const int load = guarded(std::cerr, [&] {
    cfg = load_config(resolve(config_arg));
    if (dt) cfg.dt = *dt;
    if (t_end) cfg.t_end = *t_end;
    if (out_dir) cfg.output_dir = *out_dir;
    validate(cfg);
  });
  if (load != kExitOk) return load;

  if (run->parsed()) return cmd_run(cfg, std::cout, std::cerr);
  if (converge->parsed()) return cmd_converge(cfg, std::cout, std::cerr);
  return cmd_compare(cfg, std::cout, std::cerr);
}
