// fkpi-lab: batch entry point. Exit 0 when every record passes, 2 when a probe fails,
// 1 on configuration or execution errors.
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fkpi/runner.hpp"

namespace {

const std::vector<std::string> kCommandNames{"simulate",     "conserve",       "strichartz",
                                             "bilinear",     "trilinear",      "scaling",
                                             "illposedness", "resonance-scan", "transversality"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for the fractional KP-I equation: simulation, conservation checks, "
               "symbol scans and estimate probes."};
  app.usage("fkpi-lab <command> --config <file> [--set key=value]... [--output-dir DIR] [--seed S]");
  std::string command;
  std::string config_path;
  std::vector<std::string> sets;
  std::string output_dir;
  long long seed = -1;
  app.add_option("command", command, "experiment to run")->required()->check(CLI::IsMember(kCommandNames));
  app.add_option("--config,-c", config_path, "JSON configuration file (omit to use defaults only)");
  app.add_option("--set,-s", sets, "override a configuration key, dotted path: --set probe.trials_per_point=4")
      ->allow_extra_args(false);
  app.add_option("--output-dir,-o", output_dir, "artifact directory (overrides output_dir)");
  app.add_option("--seed", seed, "seed (overrides seed)")->check(CLI::NonNegativeNumber);
  app.footer("Configuration keys and defaults (a key given in the file or by --set replaces the "
             "default; unknown keys are rejected):\n" +
             fkpi::config_reference() +
             "\nOutputs: manifest.json, records.csv | records.jsonl, slopes.json, plotdata/*.dat, "
             "FAILED on error.\nExit status: 0 all pass, 2 a probe failed, 1 error.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    std::string text = "{}";
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot read config file " + config_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
      const auto doc = nlohmann::json::parse(text, nullptr, false);
      if (doc.is_object() && doc.contains("command") && doc["command"] != command) {
        throw std::invalid_argument("config: command: file says " + doc["command"].dump() +
                                    " but the command line says \"" + command + "\"");
      }
    }
    std::vector<std::string> overrides{"command=\"" + command + "\""};
    overrides.insert(overrides.end(), sets.begin(), sets.end());
    if (!output_dir.empty()) overrides.push_back("output_dir=" + nlohmann::json(output_dir).dump());
    if (seed >= 0) overrides.push_back("seed=" + std::to_string(seed));
    const fkpi::RunConfig config = fkpi::parse_config(text, overrides);
    return fkpi::run(config, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "fkpi-lab: " << e.what() << "\n";
    return 1;
  }
}
