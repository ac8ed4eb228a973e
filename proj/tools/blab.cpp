#include <CLI11.hpp>

#include <blab/harness/commands.hpp>

#include <filesystem>
#include <iostream>

namespace {

std::string command_list() {
  std::string out;
  for (const auto& [name, cmd] : blab::command_table()) out += (out.empty() ? "" : ", ") + name;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"blab: Bergman projection commutator experiments"};
  std::string command, config_path, out_dir = ".";
  std::optional<std::string> seed, budget, dim;
  bool plot = false;
  app.add_option("command", command, "one of: " + command_list())->required();
  app.add_option("--config", config_path, "key=value config file")->required();
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--budget", budget, "override the sample budget");
  app.add_option("--dim", dim, "override the complex dimension");
  app.add_option("--out", out_dir, "output directory for <command>.csv");
  app.add_flag("--plot", plot, "also write <command>.svg");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  blab::ExperimentResult result;
  try {
    auto cfg = blab::ExperimentConfig::load(config_path);
    if (seed) cfg.set("seed", *seed);
    if (budget) cfg.set("budget", *budget);
    if (dim) cfg.set("dim", *dim);
    result = blab::run_command(command, cfg);
  } catch (const blab::ConfigError& e) {
    std::cerr << "blab: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "blab: " << e.what() << "\n";
    return 2;
  }

  std::filesystem::create_directories(out_dir);
  const auto base = std::filesystem::path(out_dir) / command;
  blab::write_text_file(base.string() + ".csv", result.table.str());
  if (plot && result.plot) blab::write_text_file(base.string() + ".svg", blab::render_svg(*result.plot));

  for (const auto& c : result.checks)
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : "  [" + c.detail + "]") << "\n";
  std::cout << base.string() << ".csv: " << (result.passed() ? "all checks passed" : "assertion failure") << "\n";
  return result.passed() ? 0 : 1;
}
