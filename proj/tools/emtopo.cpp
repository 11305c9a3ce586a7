#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emtopo/cli/commands.hpp"
#include "emtopo/cli/config.hpp"
#include "emtopo/errors.hpp"

using namespace emtopo::cli;

namespace {

struct Overrides {
  std::string config;
  std::string weights;
  std::string fixture;
  double cutoff = 0.0;
  std::string grid;
  std::string bands;
  int n_bands = 0;
  std::vector<std::string> tol;
  std::string out;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "job configuration (JSON)");
  sub->add_option("--weights", o.weights, "weight file (JSON)");
  sub->add_option("--fixture", o.fixture, "built-in medium instead of a weight file");
  sub->add_option("--cutoff", o.cutoff, "plane-wave cutoff in units of 2pi/a");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--tol", o.tol, "tolerance override KEY=VAL (repeatable)");
}

JobConfig build_config(const Overrides& o) {
  JobConfig c = o.config.empty() ? parse_config(nlohmann::json::object(), ".") : load_config(o.config);
  if (!o.weights.empty()) {
    c.weights_path = o.weights;
    c.fixture.reset();
  }
  if (!o.fixture.empty()) {
    c.fixture = o.fixture;
    c.weights_path.reset();
  }
  if (!c.weights_path && !c.fixture) throw emtopo::ConfigError("no medium given (use --config, --weights or --fixture)");
  if (o.cutoff > 0) c.cutoff = o.cutoff;
  if (!o.grid.empty()) c.grid = parse_grid(o.grid);
  if (!o.bands.empty()) std::tie(c.band_lo, c.band_hi) = parse_bands(o.bands);
  if (o.n_bands > 0) c.n_bands = o.n_bands;
  for (const auto& t : o.tol) c.tol.set(t);
  if (!o.out.empty()) c.out_dir = o.out;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Band structure, topology and dynamics of periodic electromagnetic media"};
  app.require_subcommand(1);
  Overrides o;

  auto* classify = app.add_subcommand("classify", "symmetry class and admissible invariants");
  add_common(classify, o);
  auto* bands = app.add_subcommand("bands", "band structure along a path");
  add_common(bands, o);
  bands->add_option("--nbands", o.n_bands, "positive bands to report");
  auto* chern = app.add_subcommand("chern", "Chern numbers of a band selection");
  add_common(chern, o);
  chern->add_option("--grid", o.grid, "N1xN2[xN3]");
  chern->add_option("--bands", o.bands, "a..b (1-based positive bands)");
  auto* evolve = app.add_subcommand("evolve", "time evolution of one fiber");
  add_common(evolve, o);
  auto* check = app.add_subcommand("check", "consistency checks on a medium");
  add_common(check, o);

  std::string fixture_name, fixture_path;
  auto* fixture = app.add_subcommand("fixture", "write a built-in medium as a weight file");
  fixture->add_option("name", fixture_name, "fixture name")->required();
  fixture->add_option("path", fixture_path, "output file")->required();
  fixture->footer([] {
    std::string s = "Fixtures:";
    for (const auto& n : fixture_names()) s += " " + n;
    return s;
  }());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  if (fixture->parsed()) return cmd_fixture(fixture_name, fixture_path, std::cout);

  JobConfig c;
  try {
    c = build_config(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  if (classify->parsed()) return cmd_classify(c, std::cout);
  if (bands->parsed()) return cmd_bands(c, std::cout);
  if (chern->parsed()) return cmd_chern(c, std::cout);
  if (evolve->parsed()) return cmd_evolve(c, std::cout);
  return cmd_check(c, std::cout);
}
