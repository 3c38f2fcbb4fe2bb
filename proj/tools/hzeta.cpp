#include <iostream>

#include "CLI11.hpp"
#include "hz/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Selberg-type zeta functions, resonances and Patterson-Sullivan residues of Schottky groups"};
  app.require_subcommand(1, 1);
  hz::cli::Options opt;
  double scale = 1.0;
  int nodes = 0;
  double l_max = 0.0;
  std::string config, out;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "run configuration (JSON)")->required();
    sub->add_option("--out", out, "output directory (overrides output_dir)");
    sub->add_option("--threads", opt.threads, "worker cap")->check(CLI::PositiveNumber);
    sub->add_option("--tolerance-scale", scale, "multiplies every tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--n-nodes", nodes, "collocation nodes per interval (overrides N)");
    sub->add_option("--l-max", l_max, "length cutoff (overrides L_max)");
  };
  const std::pair<const char*, const char*> subs[] = {
      {"spectrum", "length spectrum CSV"},
      {"zeta", "zeta sweep over the s-grid, CSV"},
      {"resonances", "zeros of the transfer determinant, JSON"},
      {"ps-residue", "pairing against determinant residues at the ground resonance, JSON"},
      {"verify", "identity suite with a pass/fail table"}};
  for (const auto& [name, help] : subs) add_common(app.add_subcommand(name, help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  opt.command = app.get_subcommands().front()->get_name();
  const CLI::App* sub = app.get_subcommands().front();
  opt.config = config;
  if (sub->count("--out")) opt.out = out;
  if (sub->count("--n-nodes")) opt.overrides.nodes = nodes;
  if (sub->count("--l-max")) opt.overrides.L_max = l_max;
  opt.overrides.tolerance_scale = scale;
  return hz::cli::run(opt, std::cerr);
}
