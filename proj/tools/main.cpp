// curvflow: check, run, verify and report subcommands.

#include <iostream>

#include "CLI11.hpp"
#include "curvflow/cli.hpp"
#include "curvflow/errors.hpp"

int main(int argc, char** argv) {
  using namespace curvflow;
  CLI::App app{"Curvature flows of convex hypersurfaces on support functions"};
  app.require_subcommand(1);

  std::string config;
  bool force = false;
  long stride = 0;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string selector = "all";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Run configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--stride", stride, "Snapshot stride (overrides output.stride)");
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "Seed (overrides the config)");
  };

  CLI::App* check = app.add_subcommand("check", "Validate the problem data");
  add_common(check);
  CLI::App* run = app.add_subcommand("run", "Run the flow with monitors");
  add_common(run);
  run->add_flag("--force", force, "Run even if the validators fail");
  CLI::App* verify = app.add_subcommand("verify", "Run the built-in property suites");
  verify->add_option("selector", selector, "symfun, sphere or all")->check(CLI::IsMember({"symfun", "sphere", "all"}));
  verify->add_option("--seed", seed, "Seed for the random samples");
  CLI::App* report = app.add_subcommand("report", "Summarise an earlier run");
  report->add_option("--out", out_dir, "Output directory of the run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kBadInput;
  }

  try {
    if (*verify) return cli::cmd_verify(selector, seed, std::cout);
    if (*report) return cli::cmd_report(out_dir, std::cout);

    cli::Overrides o;
    CLI::App* sub = *check ? check : run;
    if (sub->count("--stride")) o.stride = stride;
    if (sub->count("--out")) o.out_dir = out_dir;
    if (sub->count("--seed")) o.seed = seed;
    const RunConfig cfg = cli::load_with_overrides(config, o);
    return *check ? cli::cmd_check(cfg, std::cout) : cli::cmd_run(cfg, force, std::cout);
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what();
    if (!e.field().empty()) std::cerr << " [field " << e.field() << (e.line() ? ", line " + std::to_string(e.line()) : "") << "]";
    std::cerr << '\n';
    return cli::kBadInput;
  } catch (const DegeneracyError& e) {
    std::cerr << "degeneracy: " << e.what() << '\n';
    return cli::kDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kBadInput;
  }
}
