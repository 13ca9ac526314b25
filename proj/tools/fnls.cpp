#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "fnls/cli_harness.hpp"
#include "fnls/errors.hpp"

namespace {

constexpr int kExitUsage = 2;

int exit_code(fnls::Verdict v) { return v == fnls::Verdict::Fail ? 1 : 0; }

std::map<int, double> parse_tighten(const std::vector<std::string>& items) {
  std::map<int, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw fnls::ConfigError("--tighten expects id=factor, got '" + item + "'");
    try {
      out[std::stoi(item.substr(0, eq))] = std::stod(item.substr(eq + 1));
    } catch (const std::logic_error&) {
      throw fnls::ConfigError("--tighten expects id=factor, got '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiment runner for the eps-dependent fourth-order NLS library"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", suite = "smoke";
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  bool plot = false;
  std::vector<std::string> tighten;

  std::vector<CLI::App*> runs;
  for (const auto& e : fnls::experiment_registry()) {
    auto* sub = app.add_subcommand(e.name, e.summary);
    sub->add_option("--config", config_path, "key=value config file; omitted keys take defaults")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--seed", seed, "64-bit seed");
    sub->add_flag("--plot", plot, "write SVG figures");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    runs.push_back(sub);
  }
  auto* verify = app.add_subcommand("verify", "run the acceptance suite and write summary.csv");
  verify->add_option("--suite", suite, "smoke or full")->check(CLI::IsMember({"smoke", "full"}));
  verify->add_option("--out", out_dir, "output directory")->required();
  verify->add_option("--tighten", tighten, "divide a criterion's tolerances, e.g. 3=100");
  verify->add_option("--seed", seed, "64-bit seed");
  verify->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  auto* list = app.add_subcommand("list", "list experiments and their config keys");

  if (argc > 1 && argv[1][0] != '-' && !app.get_subcommand_no_throw(argv[1])) {
    try {
      fnls::find_experiment(argv[1]);
    } catch (const fnls::RegistryError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (list->parsed()) {
      for (const auto& e : fnls::experiment_registry()) {
        std::cout << e.name << "  [" << e.anchor << "]\n  " << e.summary << "\n";
        for (const auto& k : e.keys) std::cout << "    " << k.name << " = " << k.default_value << "  # " << k.doc << "\n";
      }
      return 0;
    }
    if (verify->parsed()) {
      const auto results = fnls::verify_all(fnls::parse_suite(suite), parse_tighten(tighten), workers, seed);
      std::filesystem::create_directories(out_dir);
      fnls::write_csv(std::filesystem::path(out_dir) / "summary.csv", fnls::summary_table(results), fnls::utc_timestamp());
      bool ok = true;
      for (const auto& r : results) {
        std::cout << "criterion " << r.id << ": " << fnls::to_string(r.verdict) << "  " << r.title << "  ("
                  << r.detail << ")\n";
        ok = ok && r.verdict != fnls::Verdict::Fail;
      }
      return ok ? 0 : 1;
    }
    for (auto* sub : runs) {
      if (!sub->parsed()) continue;
      const fnls::Config cfg = config_path.empty() ? fnls::Config{} : fnls::Config::load(config_path);
      const auto rec = fnls::run_experiment(sub->get_name(), cfg, out_dir, fnls::RunOptions{seed, plot, workers});
      std::cout << rec.name << ": " << fnls::to_string(rec.verdict) << "  " << rec.detail << "\n";
      return exit_code(rec.verdict);
    }
  } catch (const fnls::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fnls::RegistryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
