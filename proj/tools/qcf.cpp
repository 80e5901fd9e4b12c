// qcf command line: run, verify, plot.
// Exit codes: 0 success, 1 verification failure, 2 config error, 3 blow-up.

#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "qcf/output.hpp"
#include "qcf/runner.hpp"
#include "qcf/verification.hpp"

namespace {

enum Exit { ok = 0, verify_failed = 1, config_failed = 2, blew_up = 3, internal = 4 };

int cmd_run(const std::string& config, const std::string& out, bool quiet) {
  qcf::RunConfig cfg = qcf::parse_config(config);
  std::filesystem::path dir = out.empty() ? cfg.output_dir : std::filesystem::path(out);
  if (dir.empty()) qcf::fail(qcf::ErrorKind::config_error, "no output directory: pass --out or set output.dir");
  const auto t0 = std::chrono::steady_clock::now();
  long long last_report = 0;
  auto progress = [&](long long step, double t) {
    if (quiet || step - last_report < 500) return;
    last_report = step;
    std::cerr << "step " << step << "  t = " << t << '\n';
  };
  const qcf::RunResult r = qcf::run(cfg, dir, progress);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "status " << r.status << ", " << r.steps << " steps, t = " << qcf::format_double(r.t_final) << ", "
            << r.records << " records, " << secs << " s\n";
  if (r.status == "blow_up") {
    std::cerr << r.message << '\n';
    return blew_up;
  }
  return ok;
}

int cmd_verify(const std::string& suite, const std::string& out, bool quick) {
  return qcf::run_verification_suite(suite, out, std::cout, quick) ? ok : verify_failed;
}

int cmd_plot(const std::string& run_dir, const std::string& quantity) {
  std::cout << qcf::extract_series(std::filesystem::path(run_dir) / "invariants.csv", quantity);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcf: hybrid quantum-classical fluid solver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", qcf::code_version());

  std::string config, out, suite = "all", run_dir, quantity;
  bool quiet = false, quick = false;

  auto* run = app.add_subcommand("run", "integrate a configured run");
  run->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory (overrides output.dir)");
  run->add_flag("--quiet", quiet, "no progress on stderr");

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", suite, "suite name")
      ->check(CLI::IsMember({"algebra", "convergence", "dephasing", "reductions", "all"}));
  verify->add_option("--out", out, "directory for the JSON reports");
  verify->add_flag("--quick", quick, "smaller grids and shorter runs");

  auto* plot = app.add_subcommand("plot", "print one invariants column as t,value CSV");
  plot->add_option("--run", run_dir, "run output directory")->required();
  plot->add_option("--quantity", quantity, "column name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_failed;
  }

  try {
    if (*run) return cmd_run(config, out, quiet);
    if (*verify) return cmd_verify(suite, out, quick);
    if (*plot) return cmd_plot(run_dir, quantity);
  } catch (const qcf::Error& e) {
    std::cerr << e.what() << '\n';
    switch (e.kind()) {
      case qcf::ErrorKind::config_error:
      case qcf::ErrorKind::parse_error:
      case qcf::ErrorKind::io_error:
        return config_failed;
      case qcf::ErrorKind::blow_up:
      case qcf::ErrorKind::vacuum_error:
        return blew_up;
      default:
        return internal;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return internal;
  }
  return ok;
}
