#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "spl/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stiff pressure limit lab: solvers and checks for the stiff-pressure tumor growth model"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;

  const char* names[] = {"simulate-pme", "simulate-limit", "converge", "barrier-check", "lemma-check"};
  const char* help[] = {"run the m-dependent density solver", "run the limit free-boundary solver",
                        "compare m-dependent runs with the limit run", "construct and verify a barrier bundle",
                        "run the scaling checks for the free-boundary lemmas"};
  for (int i = 0; i < 5; ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_option("--seed", seed, "seed for randomized checks (overrides lemma.seed)")
        ->each([&](const std::string&) { seed_given = true; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    spl::RunConfig config = spl::load_config(config_path);
    if (seed_given) config.lemma.seed = seed;
    const auto ctx = spl::cli::make_context(std::move(config), out_dir, std::cout);
    return spl::cli::run_command(app.get_subcommands().front()->get_name(), ctx);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
