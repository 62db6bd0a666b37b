#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qsim/errors.hpp"
#include "qsim/runner.hpp"
#include "qsim/scenario.hpp"
#include "qsim/svg.hpp"

namespace {

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

qsim::AtmosphereTable pick_atmosphere(const std::string& explicit_path,
                                      const std::string& scenario_dir) {
  namespace fs = std::filesystem;
  if (!explicit_path.empty()) return qsim::AtmosphereTable::from_file(explicit_path);
  const std::string beside_presets = scenario_dir + "/../data/atmosphere.txt";
  if (fs::exists(beside_presets)) return qsim::AtmosphereTable::from_file(beside_presets);
  if (fs::exists("data/atmosphere.txt")) {
    return qsim::AtmosphereTable::from_file("data/atmosphere.txt");
  }
  return qsim::AtmosphereTable::builtin();
}

qsim::PlotKind plot_kind_for(qsim::Command cmd) {
  switch (cmd) {
    case qsim::Command::pass: return qsim::PlotKind::elevation_vs_time;
    case qsim::Command::balloon:
    case qsim::Command::sweep: return qsim::PlotKind::rate_vs_param;
    default: return qsim::PlotKind::rate_vs_time;
  }
}

void print_summary(const qsim::RunOutput& out, const std::string& csv_path) {
  std::cout << "rows: " << out.rows.size() << " -> " << csv_path << "\n";
  for (const auto& l : out.summary.links) {
    std::cout << "  " << l.name << ": max rate " << fmt6(l.max_rate);
    if (!std::isnan(l.t_at_max)) std::cout << " at t=" << fmt6(l.t_at_max) << " s";
    std::cout << ", qber " << fmt6(l.qber_at_max);
    if (!std::isnan(l.key_bits)) std::cout << ", key/pass " << fmt6(l.key_bits) << " bits";
    std::cout << "\n";
  }
  if (!std::isnan(out.summary.chain_min)) {
    std::cout << "  chain min: " << fmt6(out.summary.chain_min) << "\n";
  }
  if (!std::isnan(out.summary.throughput_bits_s)) {
    std::cout << "  throughput: " << fmt6(out.summary.throughput_bits_s) << " bits/s\n";
  }
  for (const auto& n : out.summary.notes) std::cout << "  note: " << n << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-photon Monte Carlo simulator for satellite- and balloon-linked "
               "quantum key distribution"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::string atmosphere_path;
  std::uint64_t seed = 0;
  int trials = 0;
  bool plot = false;

  const struct { const char* name; const char* desc; } kCommands[] = {
      {"pass", "pass geometry only: elevation and range per track point"},
      {"downlink", "satellite-to-station BB84 rate over the pass"},
      {"chain", "trusted-node chain: client fiber, two downlinks, client fiber"},
      {"bbm92", "entangled-pair distribution to two stations"},
      {"balloon", "balloon-relayed chain between two ground clients"},
      {"sweep", "downlink rate sweep over one channel parameter"},
  };
  for (const auto& c : kCommands) {
    CLI::App* sub = app.add_subcommand(c.name, c.desc);
    sub->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    sub->add_option("--seed", seed, "override the scenario seed");
    sub->add_option("--trials", trials, "override the scenario trial count");
    sub->add_option("--out", out_dir, "output directory (default: out)");
    sub->add_option("--atmosphere", atmosphere_path, "atmosphere table file");
    sub->add_flag("--plot", plot, "also write an SVG plot");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::string cmd_name = app.get_subcommands().front()->get_name();
    const qsim::Command cmd = qsim::command_from_string(cmd_name);

    qsim::Scenario sc = qsim::load_scenario(scenario_path);
    if (app.get_subcommands().front()->count("--seed") > 0) sc.seed = seed;
    if (app.get_subcommands().front()->count("--trials") > 0) {
      if (trials < 1) throw qsim::ConfigError("--trials must be >= 1");
      sc.trials = trials;
    }
    const qsim::AtmosphereTable table = pick_atmosphere(atmosphere_path, sc.scenario_dir);

    const qsim::RunOutput out = qsim::run_scenario(sc, cmd, table);

    std::filesystem::create_directories(out_dir);
    const std::string base = out_dir + "/" + sc.name + "-" + cmd_name;
    const std::string csv_path = base + ".csv";
    {
      std::ofstream csv(csv_path);
      if (!csv) throw qsim::DataError("cannot write '" + csv_path + "'");
      qsim::write_csv(csv, out.rows);
    }

    std::cout << "scenario " << sc.name << ", command " << cmd_name << ", seed " << sc.seed
              << "\n";
    print_summary(out, csv_path);

    if (plot) {
      const std::string svg_path = base + ".svg";
      try {
        std::ofstream svg(svg_path);
        if (!svg) throw qsim::DataError("cannot write '" + svg_path + "'");
        qsim::emit_plot(out.rows, plot_kind_for(cmd), sc.name + " " + cmd_name, svg);
        std::cout << "  plot -> " << svg_path << "\n";
      } catch (const std::invalid_argument&) {
        std::filesystem::remove(svg_path);
        std::cout << "  plot skipped: nothing to plot\n";
      }
    }
    return 0;
  } catch (const qsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const qsim::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
