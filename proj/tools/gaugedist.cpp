// gaugedist command-line tool.
//
//   gaugedist distfield|verify|derivatives|polar|gauge --config job.json [--out dir]
//             [--seed n] [--budget n] [--resolution n] [--point x1,x2,...]...
//
// Exit status: 0 success, 1 verification failure, 2 configuration error.

#include "gaugedist/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace gc = gaugedist::cli;

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic distance fields for polytope gauges"};
  app.require_subcommand(1, 1);

  std::string config_path, out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> budget, resolution;
  std::vector<std::string> points;

  for (const char* name : {"distfield", "verify", "derivatives", "polar", "gauge"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "job configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--budget", budget, "oracle sample budget");
    sub->add_option("--resolution", resolution, "grid nodes per axis");
    sub->add_option("--point", points, "query point, comma separated (repeatable)");
  }
  app.get_subcommand("distfield")->description("evaluate the distance field on the window grid");
  app.get_subcommand("verify")->description("run the verification suites");
  app.get_subcommand("derivatives")->description("derivative formulas against finite differences");
  app.get_subcommand("gauge")->description("gauge of K at each point");
  app.get_subcommand("polar")->description("gauge of the polar body (support of K) at each point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : gc::exit_config_error;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    gc::JobConfig c = gc::load_config(config_path);
    if (seed) c.seed = *seed;
    if (budget) {
      if (*budget < 100) gc::config_error("--budget", "must be at least 100");
      c.budget = *budget;
    }
    if (resolution) {
      if (*resolution < 2) gc::config_error("--resolution", "must be at least 2");
      c.nx = c.ny = *resolution;
    }
    // points on the command line replace those of the config
    std::vector<gaugedist::Vector> pts;
    for (const auto& p : points) pts.push_back(gc::parse_point(p));
    if (pts.empty()) pts = c.points;

    gc::Context ctx{out_dir, &std::cerr};
    if (cmd == "distfield") return gc::cmd_distfield(c, ctx);
    if (cmd == "verify") return gc::cmd_verify(c, ctx);
    if (cmd == "derivatives") return gc::cmd_derivatives(c, pts, ctx);
    if (cmd == "gauge") return gc::cmd_gauge(c, pts, std::cout);
    return gc::cmd_polar(c, pts, std::cout);
  } catch (const gaugedist::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == gaugedist::ErrorCode::ConfigError ? gc::exit_config_error : gc::exit_verification_failed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gc::exit_config_error;
  }
}
