#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "sinai/config.hpp"
#include "sinai/error.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"sinai-lab: random walks in random environment, estimators and checks"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the suite(s) of a JSON config");
  std::string config;
  int threads = -1;
  std::string out = "results";
  run->add_option("config", config, "config file")->required();
  run->add_option("--threads", threads, "worker threads (0: all); overrides the config");
  run->add_option("--out", out, "output directory");

  auto* report = app.add_subcommand("report", "markdown summary of a results directory");
  std::string dir;
  report->add_option("dir", dir, "results directory")->required();

  auto* density = app.add_subcommand("density", "limit density tools");
  auto* table = density->add_subcommand("table", "CSV of x, phi, error_bound");
  density->require_subcommand(1);
  double from = -5, to = 5, step = 0.01, tol = 1e-10;
  table->add_option("--from", from);
  table->add_option("--to", to);
  table->add_option("--step", step);
  table->add_option("--tol", tol);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto cfgs = sinai::load_run_config(config);
      bool all_pass = true;
      for (auto& c : cfgs) {
        if (threads >= 0) c.threads = threads;
        const auto r = sinai::run_suite(c);
        sinai::write_result(out, c.label, r);
        std::cout << c.label << ": " << (r.pass ? "PASS" : "FAIL") << "\n";
        all_pass = all_pass && r.pass;
      }
      return all_pass ? 0 : 2;
    }
    if (*report) {
      const auto rep = sinai::emit_report(dir);
      std::cout << rep.markdown;
      return rep.exit_code();
    }
    if (*table) {
      std::cout << sinai::density_table(from, to, step, tol);
      return 0;
    }
  } catch (const sinai::Error& e) {
    std::cerr << "sinai-lab: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "sinai-lab: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
