#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shilov/io.hpp"

namespace shilov {

/// Config that fails to parse, violates the schema or has dangling references.
struct ConfigError : Error {
  ValidationReport report;
  ConfigError(const std::string& what, ValidationReport r) : Error(what), report(std::move(r)) {}
};

/// Parsed experiment description. The document keeps the user's sections
/// verbatim; objects are built on demand by Experiment.
struct ExperimentConfig {
  io::Json doc;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  /// FNV-1a of the canonical JSON text of doc.
  std::string hash;
};

/// Parse, schema, reference and shape checks. Never throws for bad input;
/// a parse failure is a failed "parse" check whose detail names line and column.
ValidationReport validate_config(const std::string& path);
ValidationReport validate_config_text(const std::string& text);
ValidationReport validate_config_json(const io::Json& doc);

/// Throws ConfigError unless validate_config_text passes.
ExperimentConfig load_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct CommandOutcome {
  std::string name;
  std::string command;
  std::vector<std::string> files;
};

class Experiment {
 public:
  explicit Experiment(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  void set_output_dir(std::string dir) { config_.output_dir = std::move(dir); }
  void set_seed(std::uint64_t seed) { config_.seed = seed; }

  /// Runs one entry of the run list and writes its artifacts.
  CommandOutcome run(const io::Json& command);
  /// Runs the whole run list in order.
  std::vector<CommandOutcome> run_all();

  /// Report body of a command without the provenance envelope or files.
  io::Json evaluate(const io::Json& command);

  Algebra algebra(const std::string& name);
  RasterRegion raster(const std::string& name);
  FiniteSpace space(const std::string& name);
  FunctionSystem system(const std::string& name);
  Quadruple quadruple(const std::string& name);

 private:
  struct Artifacts {
    io::Json report;
    std::optional<std::string> csv;
    std::optional<std::string> pgm;
  };
  Artifacts execute(const io::Json& command);

  Artifacts characters_command(const io::Json& cmd);
  Artifacts validate_command(const io::Json& cmd);
  Artifacts hull_command(const io::Json& cmd);
  Artifacts shilov_command(const io::Json& cmd);
  Artifacts product_command(const io::Json& cmd, bool peaks);
  Artifacts peaker_command(const io::Json& cmd);

  const io::Json& section(const char* key, const std::string& name) const;

  ExperimentConfig config_;
  std::map<std::string, Algebra> algebras_;
  std::map<std::string, RasterRegion> rasters_;
  std::map<std::string, FiniteSpace> spaces_;
  std::map<std::string, FunctionSystem> systems_;
};

/// Default artifact name of a run entry: its "name", else command and subject.
std::string command_name(const io::Json& command);

}  // namespace shilov
