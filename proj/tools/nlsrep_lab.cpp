#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "nlsrep/config.hpp"
#include "nlsrep/lab.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nlsrep-lab: experiments for NLS with an inverse-power potential"};
  app.require_subcommand(1, 1);
  std::string config_path;
  const char* names[] = {"groundstate", "evolve", "classify", "sweep", "check"};
  const char* help[] = {
      "solve for Q (or build W) and write the reference artifact",
      "integrate the configured run and write CSV, summary and checkpoints",
      "static global / blow-up threshold verdict for the initial data",
      "run the [sweep] ladder on a worker pool and tabulate outcomes",
      "run the invariant suite; exit 0 only if every check passes",
  };
  for (int i = 0; i < 5; ++i) app.add_subcommand(names[i], help[i])->add_option("config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : nlsrep::exit_config;
  }

  try {
    const nlsrep::ExperimentConfig cfg = nlsrep::load_config(config_path);
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "groundstate") return nlsrep::cmd_groundstate(cfg, std::cout);
    if (cmd == "evolve") return nlsrep::cmd_evolve(cfg, std::cout);
    if (cmd == "classify") return nlsrep::cmd_classify(cfg, std::cout);
    if (cmd == "sweep") return nlsrep::cmd_sweep(cfg, std::cout);
    return nlsrep::cmd_check(cfg, std::cout);
  } catch (const nlsrep::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return nlsrep::exit_code_for(e.code());
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return nlsrep::exit_resource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return nlsrep::exit_numerical;
  }
}
