#include <iostream>

#include <CLI11.hpp>

#include "loctriv/driver.hpp"
#include "loctriv/random.hpp"

using loctriv::ExperimentConfig;

namespace {

void add_options(CLI::App* app, ExperimentConfig& c) {
  app->add_option("-i,--input", c.input, "input file");
  app->add_option("-o,--output", c.output, "output file");
  app->add_option("--map", c.map, "localization map file (read, or written by instance)");
  app->add_option("--circuit", c.circuit, "circuit file");
  app->add_option("--sets", c.sets, "clustering file (sets or clusters)");
  app->add_option("--kind", c.kind, "file kind for roundtrip")
      ->check(CLI::IsMember({"auto", "graph", "clustering", "complex", "map", "hamiltonian", "circuit"}));
  app->add_option("--instance", c.instance, "generator name");
  app->add_option("--X", c.X, "vertex set")->delimiter(',');
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--n", c.n, "vertex or site count");
  app->add_option("--d", c.d, "degree");
  app->add_option("--r", c.r, "ensemble loop length parameter");
  app->add_option("--R", c.R, "range");
  app->add_option("--l", c.l, "block side");
  app->add_option("--L", c.L, "lattice side");
  app->add_option("--D", c.D, "lattice dimension");
  app->add_option("--hole", c.hole, "plaquette removal period");
  app->add_option("--maxC", c.maxC, "maximum cluster size");
  app->add_option("--depth", c.depth, "cover depth");
  app->add_option("--trials", c.trials, "trial count");
  app->add_option("--restarts", c.restarts, "search restarts");
  app->add_option("--epsilon", c.epsilon, "deleted fraction");
  app->add_option("--jobs", c.jobs, "worker threads (default LOCTRIV_JOBS or 1)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"loctriv: localization and trivialization of commuting Hamiltonians"};
  app.require_subcommand(1);
  ExperimentConfig c;
  c.jobs = loctriv::default_jobs();
  for (const auto& name : loctriv::command_names()) add_options(app.add_subcommand(name), c);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  c.command = app.get_subcommands().front()->get_name();
  return loctriv::run(c, std::cout, std::cerr);
}
