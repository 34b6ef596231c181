// bakerfr: command-line front end. Settings come from defaults, then an
// optional --config file, then flags. --sweep runs one experiment per line.
#include <algorithm>
#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bakerfr/commands.hpp"

namespace {

struct Flags {
  std::string config_file;
  std::string sweep_file;
  std::vector<std::pair<std::string, std::string>> overrides;
};

int run_one(const std::string& name, const bakerfr::ExperimentConfig& cfg) {
  const auto result = bakerfr::command_table().at(name)(cfg);
  for (const auto& f : result.files) std::cout << "wrote " << f << '\n';
  std::cout << name << ": " << result.summary << (result.exit_code == 0 ? " [pass]" : " [FAIL]") << '\n';
  return result.exit_code;
}

int run(const std::string& name, const Flags& flags) {
  bakerfr::ExperimentConfig cfg;
  if (!flags.config_file.empty()) bakerfr::apply_kv(cfg, bakerfr::read_text_file(flags.config_file));
  for (const auto& [k, v] : flags.overrides) cfg.set(k, v);
  if (flags.sweep_file.empty()) return run_one(name, cfg);

  const auto runs = bakerfr::parse_sweep(bakerfr::read_text_file(flags.sweep_file));
  int worst = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    bakerfr::ExperimentConfig c = cfg;
    for (const auto& [k, v] : runs[i]) c.set(k, v);
    char dir[32];
    std::snprintf(dir, sizeof dir, "run_%03zu", i);
    c.out = cfg.out + "/" + dir;
    worst = std::max(worst, run_one(name, c));
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fluctuation-relation laboratory for dissipative baker maps"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> help{
      {"density", "invariant x-density versus the closed form"},
      {"fr", "fluctuation relation for the g statistic (exact DP or Monte Carlo)"},
      {"upo", "periodic-orbit expansion (exact for map1, diagnostic for map2)"},
      {"multibaker", "transport current of the multibaker lift and linear-response sweep"},
      {"reversibility", "G G = I, G M G M = I, Jacobian rule and region conjugacy"},
      {"map", "dump the map as JSON with exact rational coefficients"},
      {"trajectory", "exact trajectory with region labels and cumulative g"},
  };

  Flags flags;
  std::string chosen;
  std::map<std::string, std::string> values;
  for (const auto& [name, text] : help) {
    CLI::App* sub = app.add_subcommand(name, text);
    sub->add_option("--config", flags.config_file, "key = value configuration file");
    sub->add_option("--sweep", flags.sweep_file, "one run per line of key=value overrides, written to <out>/run_###");
    for (const auto& key : bakerfr::ExperimentConfig::keys()) {
      std::string flag = "--" + key;
      for (auto& ch : flag)
        if (ch == '_') ch = '-';
      sub->add_option(flag, values[key], key);
    }
    sub->callback([&chosen, name = name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (const auto& key : bakerfr::ExperimentConfig::keys())
    if (!values[key].empty()) flags.overrides.emplace_back(key, values[key]);

  try {
    return run(chosen, flags);
  } catch (const bakerfr::ConstructionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const bakerfr::UnsupportedOperation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const bakerfr::UndefinedValue& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
