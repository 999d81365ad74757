#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "snspec/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Steklov-Neumann eigenvalue experiments"};
  app.require_subcommand(1);

  const std::vector<std::pair<const char*, snspec::Command>> commands{
      {"exact", snspec::Command::exact},       {"solve", snspec::Command::solve},
      {"sweep", snspec::Command::sweep},       {"lemmas", snspec::Command::lemmas},
      {"nodal", snspec::Command::nodal},       {"dumbbell", snspec::Command::dumbbell},
      {"sandwich", snspec::Command::sandwich}, {"isoperimetric", snspec::Command::isoperimetric},
  };
  const std::vector<std::string> help{
      "closed-form eigenvalues of the concentric annulus",
      "eigenpairs of one domain",
      "eccentricity or hole_shrink sweep",
      "lemma integrals and the Rayleigh bound",
      "nodal-domain count of the first eigenspace",
      "dumbbell test-function quotient",
      "star-shaped sandwich bounds",
      "equal-measure / equal-perimeter comparison",
  };

  std::string config;
  std::string out = "out";
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, help[i]);
    sub->add_option("--config", config, "experiment config (INI)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->capture_default_str();
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : snspec::kExitConfig;
  }

  for (std::size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->parsed()) return snspec::run_command(commands[i].second, config, out, std::cout, std::cerr);
  return snspec::kExitConfig;
}
