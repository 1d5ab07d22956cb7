#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "shilov/experiment.hpp"

namespace {

constexpr int kConfigFailure = 2;
constexpr int kRuntimeFailure = 3;

int fail(const std::string& kind, const std::string& message, const shilov::io::Json& extra = {}) {
  shilov::io::Json err{{"error", {{"kind", kind}, {"message", message}}}};
  if (!extra.is_null()) err["error"].update(extra);
  std::cerr << err.dump() << '\n';
  return kind == "config" ? kConfigFailure : kRuntimeFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gelfand theory, peak points and Shilov boundaries of finite function algebras"};
  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--output-dir", output_dir, "directory for reports (overrides the config)");
  app.add_option("--seed", seed, "64-bit seed (overrides the config)");
  app.add_flag("--quiet", quiet, "print nothing on success");
  CLI11_PARSE(app, argc, argv);

  std::optional<shilov::Experiment> experiment;
  try {
    experiment.emplace(shilov::load_config(config_path));
  } catch (const shilov::ConfigError& e) {
    return fail("config", e.what(), {{"report", shilov::io::to_json(e.report)}});
  }
  if (output_dir) experiment->set_output_dir(*output_dir);
  if (seed) experiment->set_seed(*seed);

  for (const auto& command : experiment->config().doc.at("run")) {
    const std::string name = shilov::command_name(command);
    try {
      const auto outcome = experiment->run(command);
      if (!quiet)
        for (const auto& f : outcome.files) std::cout << outcome.command << ' ' << outcome.name << " -> " << f << '\n';
    } catch (const shilov::ConfigError& e) {
      return fail("config", e.what(), {{"command", name}, {"report", shilov::io::to_json(e.report)}});
    } catch (const shilov::io::FormatError& e) {
      return fail("config", e.what(), {{"command", name}});
    } catch (const std::exception& e) {
      return fail("runtime", e.what(), {{"command", name}});
    }
  }
  return 0;
}
