#include <csignal>
#include <fstream>
#include <iostream>

#include "evoml/error.hpp"
#include "evoml/parallel.hpp"
#include "evoml/pipeline.hpp"
#include "evoml/service.hpp"

// After Eigen: resolv.h defines a _res macro.
#include <CLI11.hpp>
#include <httplib.h>

namespace {

httplib::Server* g_server = nullptr;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw evoml::Error(evoml::ErrorCode::Io, "cannot write " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visual-analytics style hyperparameter evolution and ensemble search"};
  app.require_subcommand(1);

  evoml::RunOptions run;
  std::filesystem::path report_path = "report.json";
  std::filesystem::path session_path;
  bool quiet = false;
  unsigned workers = evoml::default_worker_count();
  auto* run_cmd = app.add_subcommand("run", "Run the whole pipeline headlessly");
  run_cmd->add_option("--data", run.data, "CSV file with a header row")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--label", run.label, "Label column name")->required();
  run_cmd->add_option("--metrics", run.metrics, "Metric group or comma-separated metric names")
      ->capture_default_str();
  run_cmd->add_option("--n", run.n, "Random-search models per algorithm")->capture_default_str();
  run_cmd->add_option("--k", run.k, "Cross-validation folds (5, 10 or 15)")->capture_default_str();
  run_cmd->add_option("--stages", run.stages, "Evolution stages after the random search")->capture_default_str();
  run_cmd->add_option("--auto-ensemble", run.auto_ensemble, "Maximum ensemble size")->capture_default_str();
  run_cmd->add_option("--seed", run.seed, "Master seed")->capture_default_str();
  run_cmd->add_option("--out", report_path, "Report file")->capture_default_str();
  run_cmd->add_option("--session-out", session_path, "Also write the session document here");
  run_cmd->add_option("--workers", workers, "Training threads")->capture_default_str();
  run_cmd->add_flag("--quiet", quiet, "Suppress progress lines");

  std::string host = "127.0.0.1";
  int port = 8080;
  evoml::ServiceOptions service;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the session HTTP API");
  serve_cmd->add_option("--host", host)->capture_default_str();
  serve_cmd->add_option("--port", port)->capture_default_str();
  serve_cmd->add_option("--data-dir", service.data_dir, "Directory for saved sessions")->capture_default_str();
  serve_cmd->add_option("--workers", workers, "Training threads")->capture_default_str();

  auto* space_cmd = app.add_subcommand("space", "Print the hyperparameter space document");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      run.workers = workers;
      run.log = quiet ? nullptr : &std::cerr;
      auto result = evoml::run_pipeline(run);
      write_text(report_path, result.report.dump(2) + "\n");
      if (!session_path.empty()) write_text(session_path, evoml::save_session(result.session));
      const auto& ens = result.report["ensemble"]["spec"];
      std::cout << "best single " << result.report["best_single"]["id"].get<std::string>() << " accuracy "
                << result.report["best_single"]["accuracy"].get<double>() << "; ensemble of "
                << ens["model_ids"].size() << " accuracy " << ens["pooled_scores"]["accuracy"].get<double>() << "\n";
    } else if (*serve_cmd) {
      service.workers = workers;
      evoml::SessionService sessions(service);
      httplib::Server server;
      sessions.mount(server);
      g_server = &server;
      std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
      std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
      std::cerr << "listening on " << host << ":" << port << std::endl;
      if (!server.listen(host, port)) {
        std::cerr << "cannot listen on " << host << ":" << port << "\n";
        return 1;
      }
    } else if (*space_cmd) {
      std::cout << evoml::space_document().dump(2) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
