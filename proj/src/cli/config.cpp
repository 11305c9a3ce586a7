#include "emtopo/cli/config.hpp"

#include <filesystem>
#include <fstream>
#include <regex>

#include "emtopo/errors.hpp"
#include "emtopo/media.hpp"
#include "emtopo/weights_io.hpp"

namespace emtopo::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void Tolerances::set(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--tol expects KEY=VAL, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  double v;
  try {
    size_t used;
    v = std::stod(assignment.substr(eq + 1), &used);
    if (used != assignment.size() - eq - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ConfigError("tolerance '" + key + "' is not a number");
  }
  if (!(v > 0)) throw ConfigError("tolerance '" + key + "' must be positive");
  if (key == "symmetry") symmetry = v;
  else if (key == "zero") zero = v;
  else if (key == "link") link = v;
  else if (key == "accept") accept = v;
  else if (key == "gap") gap = v;
  else if (key == "quadrature") quadrature = v;
  else if (key == "validate_samples") validate_samples = v;
  else throw ConfigError("unknown tolerance '" + key + "'");
}

std::array<int, 3> parse_grid(const std::string& s) {
  static const std::regex re(R"((\d+)x(\d+)(?:x(\d+))?)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw ConfigError("--grid expects N1xN2[xN3], got '" + s + "'");
  std::array<int, 3> g{std::stoi(m[1]), std::stoi(m[2]), m[3].matched ? std::stoi(m[3]) : 1};
  for (int v : g)
    if (v < 1) throw ConfigError("grid sizes must be positive");
  if (!m[3].matched) g[2] = g[1];
  return g;
}

std::pair<int, int> parse_bands(const std::string& s) {
  static const std::regex re(R"((\d+)(?:\.\.(\d+))?)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw ConfigError("--bands expects a..b, got '" + s + "'");
  int a = std::stoi(m[1]);
  int b = m[2].matched ? std::stoi(m[2]) : a;
  if (a < 1 || b < a) throw ConfigError("band selection needs 1 <= a <= b");
  return {a, b};
}

namespace {

Vec3 vec3(const json& j) {
  if (!j.is_array() || j.empty() || j.size() > 3) throw ConfigError("expected 1 to 3 numbers");
  Vec3 v = Vec3::Zero();
  for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

std::string resolve(const std::string& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? p : (fs::path(base) / path).lexically_normal().string();
}

}  // namespace

JobConfig parse_config(const json& j, const std::string& base_dir) {
  JobConfig c;
  c.base_dir = base_dir;
  try {
    if (j.contains("weights")) {
      c.weights_path = resolve(base_dir, j.at("weights").get<std::string>());
      if (!fs::exists(*c.weights_path)) throw ConfigError("weight file '" + *c.weights_path + "' does not exist");
    }
    if (j.contains("fixture")) c.fixture = j.at("fixture").get<std::string>();
    if (c.weights_path && c.fixture) throw ConfigError("give either 'weights' or 'fixture', not both");
    if (j.contains("cutoff")) c.cutoff = j.at("cutoff").get<double>();
    if (j.contains("path")) {
      const auto& p = j.at("path");
      for (const auto& pt : p.at("points")) {
        if (pt.is_string()) c.path_labels.push_back(pt.get<std::string>());
        else {
          c.path_labels.push_back("");
          c.path_points.push_back(vec3(pt));
        }
      }
      if (p.contains("n_per_segment")) c.n_per_segment = p.at("n_per_segment").get<int>();
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      if (g.is_string()) c.grid = parse_grid(g.get<std::string>());
      else {
        for (size_t i = 0; i < g.size() && i < 3; ++i) c.grid[i] = g[i].get<int>();
        if (g.size() == 2) c.grid[2] = c.grid[1];
      }
    }
    if (j.contains("plane_offsets")) c.plane_offsets = vec3(j.at("plane_offsets"));
    if (j.contains("bands")) {
      const auto& b = j.at("bands");
      auto pr = b.is_string() ? parse_bands(b.get<std::string>())
                              : std::pair<int, int>{b.at(0).get<int>(), b.at(1).get<int>()};
      c.band_lo = pr.first;
      c.band_hi = pr.second;
    }
    if (j.contains("n_bands")) c.n_bands = j.at("n_bands").get<int>();
    if (j.contains("out")) c.out_dir = resolve(base_dir, j.at("out").get<std::string>());
    if (j.contains("tolerances"))
      for (const auto& [k, v] : j.at("tolerances").items()) c.tol.set(k + "=" + v.dump());
    if (j.contains("evolution")) {
      const auto& e = j.at("evolution");
      EvolutionConfig& ev = c.evolution;
      if (e.contains("k")) ev.k = vec3(e.at("k"));
      if (e.contains("t_end")) ev.t_end = e.at("t_end").get<double>();
      if (e.contains("steps")) ev.steps = e.at("steps").get<int>();
      if (e.contains("initial")) ev.initial = e.at("initial").get<std::string>();
      if (e.contains("mode")) ev.mode = e.at("mode").get<int>();
      if (e.contains("seed")) ev.seed = e.at("seed").get<std::uint64_t>();
      if (e.contains("amplitudes")) ev.amplitudes = e.at("amplitudes").get<std::vector<int>>();
      if (e.contains("nodes_per_unit")) ev.nodes_per_unit = e.at("nodes_per_unit").get<int>();
      if (e.contains("order")) ev.order = e.at("order").get<int>();
      if (e.contains("source")) {
        const auto& s = e.at("source");
        SourceConfig sc;
        if (s.contains("G")) {
          auto g = s.at("G").get<std::vector<int>>();
          if (g.size() != 3) throw ConfigError("source G must have 3 entries");
          sc.g = {g[0], g[1], g[2]};
        }
        const auto& re = s.at("current");
        if (re.size() != 3) throw ConfigError("source current must have 3 entries");
        for (int i = 0; i < 3; ++i) sc.current[i] = re[i].get<double>();
        if (s.contains("current_im"))
          for (int i = 0; i < 3; ++i) sc.current[i] += cd(0, s.at("current_im")[i].get<double>());
        if (s.contains("frequency")) sc.frequency = s.at("frequency").get<double>();
        ev.source = sc;
      }
      if (ev.initial != "random_transversal" && ev.initial != "mode")
        throw ConfigError("evolution.initial must be 'random_transversal' or 'mode'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!(c.cutoff > 0)) throw ConfigError("cutoff must be positive");
  if (c.n_bands < 1) throw ConfigError("n_bands must be positive");
  if (c.n_per_segment < 1) throw ConfigError("n_per_segment must be positive");
  if (c.evolution.steps < 1) throw ConfigError("evolution.steps must be positive");
  if (c.evolution.t_end < 0) throw ConfigError("evolution.t_end must be non-negative");
  if (c.evolution.mode < 1) throw ConfigError("evolution.mode must be positive");
  for (int a : c.evolution.amplitudes)
    if (a < 1) throw ConfigError("amplitude band indices must be positive");
  for (int g : c.grid)
    if (g < 1) throw ConfigError("grid sizes must be positive");
  return c;
}

JobConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  std::string base = fs::path(path).parent_path().string();
  return parse_config(j, base.empty() ? "." : base);
}

std::vector<std::string> fixture_names() {
  return {"vacuum_cubic",       "vacuum_square",    "vacuum_chain",   "eps4_cubic",
          "two_phase_chain",    "gyrotropic_rods",  "real_crystal",   "golden_dual_symmetric",
          "golden_non_gyrotropic", "golden_magneto_electric", "gyrotropic_homogeneous",
          "singular_chain"};
}

MaterialWeights make_fixture(const std::string& name) {
  if (name == "vacuum_cubic") return media::vacuum(Lattice::cubic());
  if (name == "vacuum_square") return media::vacuum(Lattice::square());
  if (name == "vacuum_chain") return media::vacuum(Lattice::chain());
  if (name == "eps4_cubic") return media::homogeneous_eps_mu(Lattice::cubic(), 4.0, 1.0);
  if (name == "two_phase_chain") return media::two_phase_chain();
  if (name == "gyrotropic_rods") return media::gyrotropic_rods();
  if (name == "real_crystal") return media::real_crystal();
  if (name == "golden_dual_symmetric") return media::golden_dual_symmetric();
  if (name == "golden_non_gyrotropic") return media::golden_non_gyrotropic();
  if (name == "golden_magneto_electric") return media::golden_magneto_electric();
  if (name == "gyrotropic_homogeneous") return media::gyrotropic_homogeneous(Lattice::square());
  if (name == "singular_chain") return media::singular_chain();
  throw ConfigError("unknown fixture '" + name + "'");
}

MaterialWeights load_medium(const JobConfig& c) {
  if (c.weights_path) return load_weights(*c.weights_path);
  if (c.fixture) return make_fixture(*c.fixture);
  throw ConfigError("config names no 'weights' file or 'fixture'");
}

std::vector<std::string> default_path(const Lattice& l) {
  if (l.name() == "chain") return {"G", "X"};
  if (l.name() == "square") return {"G", "X", "M", "G"};
  if (l.name() == "hexagonal") return {"G", "M", "K", "G"};
  if (l.name() == "cubic") return {"G", "X", "M", "G", "R"};
  return {};
}

std::vector<std::string> path_labels_for(const JobConfig& c, const Lattice& l) {
  return c.path_labels.empty() ? default_path(l) : c.path_labels;
}

std::vector<Vec3> resolve_path(const JobConfig& c, const Lattice& l) {
  std::vector<Vec3> out;
  size_t raw = 0;
  for (const auto& label : path_labels_for(c, l)) {
    if (label.empty()) {
      out.push_back(c.path_points[raw++]);
      continue;
    }
    auto p = l.named_point(label);
    if (!p) throw ConfigError("lattice '" + l.name() + "' has no point '" + label + "'");
    out.push_back(*p);
  }
  if (out.empty()) throw ConfigError("config has no k-path and the lattice has no default one");
  return out;
}

}  // namespace emtopo::cli
