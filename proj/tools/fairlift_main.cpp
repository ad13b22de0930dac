#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fairlift/config.hpp"
#include "fairlift/pipeline.hpp"
#include "fairlift/version.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

bool is_config_error(fairlift::Errc code) {
  switch (code) {
    case fairlift::Errc::ConfigSyntax:
    case fairlift::Errc::UnknownMetricToken:
    case fairlift::Errc::MissingRequiredKey:
    case fairlift::Errc::InvalidArgument:
    case fairlift::Errc::InvalidAlpha:
    case fairlift::Errc::DuplicateToken:
      return true;
    default:
      return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairlift: configuration-driven fairness metric computation"};
  app.set_version_flag("--version", std::string("fairlift ") + fairlift::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;
  int workers = 0;
  std::int64_t seed = -1;

  auto* run = app.add_subcommand("run", "load, join, compute metrics, write the report");
  run->add_option("--config", config_path, "configuration document")->required();
  run->add_option("--workers", workers, "override engine.workerCount");
  run->add_option("--seed", seed, "override engine.seed");
  run->add_option("--output", output_override, "override outputPath");

  auto* validate = app.add_subcommand("validate", "parse and validate the configuration only");
  validate->add_option("--config", config_path, "configuration document")->required();

  CLI11_PARSE(app, argc, argv);

  fairlift::Config config;
  try {
    config = fairlift::load_config(config_path);
  } catch (const fairlift::Error& error) {
    std::cerr << "config error: " << error.what() << "\n";
    return error.code() == fairlift::Errc::IoError ? kRuntimeError : kConfigError;
  }

  if (validate->parsed()) {
    std::cout << "ok: " << config_path << "\n";
    return kOk;
  }

  if (workers > 0) {
    config.engine.worker_count = workers;
  }
  if (seed >= 0) {
    config.engine.seed = static_cast<std::uint64_t>(seed);
  }
  if (!output_override.empty()) {
    config.output_path = output_override;
  }

  try {
    auto report = fairlift::run_pipeline(config);
    std::cout << "report written to " << config.output_path << "\n";
    const auto& warnings = report.doc["warnings"];
    for (const auto& warning : warnings) {
      std::cout << "warning: " << warning.get<std::string>() << "\n";
    }
    return kOk;
  } catch (const fairlift::Error& error) {
    std::cerr << "error: " << error.what() << "\n";
    return is_config_error(error.code()) ? kConfigError : kRuntimeError;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kRuntimeError;
  }
}
