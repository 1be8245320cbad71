// Command-line driver: config-driven sampling runs and diagnostics.
//
//   dhams <subcommand> --config <path> [--out <dir>] [--seed <u64>]
//                      [--chains <M>] [--threads <n>]
//
// Subcommands: sample | tune | tv | ess | pip.  The flags override the
// matching config keys.  Exit codes: 0 success, 2 configuration error,
// 3 runtime error.

#include <boost/program_options.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "dhams/experiment.hpp"

namespace {

void print_usage(std::ostream& out) {
  out << "usage: dhams <subcommand> --config <path> [--out <dir>]"
         " [--seed <u64>] [--chains <M>] [--threads <n>]\n"
         "subcommands:\n"
         "  sample  run chains; write draws.csv, manifest.json, and the\n"
         "          diagnostics selected in the config\n"
         "  tune    run the configured tuning procedure; write tuning.csv\n"
         "  tv      TV-distance curve from a previous run's draws.csv\n"
         "  ess     effective sample sizes from a previous run's draws.csv\n"
         "  pip     posterior inclusion probabilities from draws.csv\n"
         "exit codes: 0 success, 2 configuration error, 3 runtime error\n";
}

bool known_subcommand(const std::string& name) {
  return name == "sample" || name == "tune" || name == "tv" ||
         name == "ess" || name == "pip";
}

}  // namespace

int main(int argc, char** argv) {
  namespace po = boost::program_options;
  if (argc < 2) {
    print_usage(std::cerr);
    return 2;
  }
  const std::string subcommand = argv[1];
  if (subcommand == "-h" || subcommand == "--help" || subcommand == "help") {
    print_usage(std::cout);
    return 0;
  }
  if (!known_subcommand(subcommand)) {
    std::cerr << "dhams: unknown subcommand '" << subcommand << "'\n";
    print_usage(std::cerr);
    return 2;
  }

  po::options_description desc("options");
  desc.add_options()
      ("help,h", "show this help")
      ("config", po::value<std::string>()->required(), "config JSON path")
      ("out", po::value<std::string>(), "output directory override")
      ("seed", po::value<std::uint64_t>(), "RNG seed override")
      ("chains", po::value<int>(), "chain count override")
      ("threads", po::value<int>(), "worker thread count override");

  try {
    po::variables_map vm;
    po::store(po::parse_command_line(argc - 1, argv + 1, desc), vm);
    if (vm.count("help")) {
      print_usage(std::cout);
      return 0;
    }
    po::notify(vm);

    dhams::ExperimentConfig config =
        dhams::parse_config(vm["config"].as<std::string>());
    if (vm.count("out")) config.out_dir = vm["out"].as<std::string>();
    if (vm.count("seed")) config.seed = vm["seed"].as<std::uint64_t>();
    if (vm.count("chains")) {
      config.chains = vm["chains"].as<int>();
      if (config.chains < 1)
        throw dhams::ConfigError("--chains must be >= 1");
    }
    if (vm.count("threads")) {
      config.threads = vm["threads"].as<int>();
      if (config.threads < 1)
        throw dhams::ConfigError("--threads must be >= 1");
    }

    if (subcommand == "sample") {
      const auto summary = dhams::run_experiment(config);
      std::cout << "wrote " << summary.files_written.size() << " file(s) to "
                << config.out_dir << " in " << summary.wall_seconds << " s\n";
    } else if (subcommand == "tune") {
      dhams::run_tune_command(config);
    } else if (subcommand == "tv") {
      dhams::run_tv_command(config);
    } else if (subcommand == "ess") {
      dhams::run_ess_command(config);
    } else {
      dhams::run_pip_command(config);
    }
    return 0;
  } catch (const dhams::ConfigError& e) {
    std::cerr << "dhams: config error: " << e.what() << '\n';
    return 2;
  } catch (const po::error& e) {
    std::cerr << "dhams: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "dhams: runtime error: " << e.what() << '\n';
    return 3;
  }
}
