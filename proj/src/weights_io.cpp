#include "emtopo/weights_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "emtopo/errors.hpp"

namespace emtopo {

using nlohmann::json;

Lattice lattice_from_json(const json& j) {
  if (j.is_string()) return Lattice::preset(j.get<std::string>());
  if (j.contains("preset")) return Lattice::preset(j.at("preset").get<std::string>());
  if (j.contains("basis")) {
    std::vector<Vec3> basis;
    for (const auto& v : j.at("basis")) {
      if (!v.is_array() || v.size() < 1 || v.size() > 3)
        throw ConfigError("basis vectors must have 1 to 3 components");
      Vec3 a = Vec3::Zero();
      for (size_t i = 0; i < v.size(); ++i) a[i] = v[i].get<double>();
      basis.push_back(a);
    }
    return Lattice(basis);
  }
  throw ConfigError("lattice needs 'preset' or 'basis'");
}

json lattice_to_json(const Lattice& l) {
  if (l.name() != "custom") return json{{"preset", l.name()}};
  json b = json::array();
  for (const auto& v : l.basis()) b.push_back({v[0], v[1], v[2]});
  return json{{"basis", b}};
}

namespace {

Eigen::MatrixXd read_matrix(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 6)
    throw MalformedCoefficients(std::string(what) + " must be a 6x6 array");
  Eigen::MatrixXd m(6, 6);
  for (int r = 0; r < 6; ++r) {
    if (!j[r].is_array() || j[r].size() != 6)
      throw MalformedCoefficients(std::string(what) + " must be a 6x6 array");
    for (int c = 0; c < 6; ++c) {
      if (!j[r][c].is_number()) throw MalformedCoefficients(std::string(what) + " has a non-number");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

json write_matrix(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (int r = 0; r < 6; ++r) {
    json row = json::array();
    for (int c = 0; c < 6; ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

}  // namespace

MaterialWeights weights_from_json(const json& j) {
  MaterialWeights w;
  try {
    w.lattice = lattice_from_json(j.at("lattice"));
    const auto& b = j.at("bounds");
    if (!b.is_array() || b.size() != 2) throw MalformedCoefficients("bounds must be [c, C]");
    w.c_lower = b[0].get<double>();
    w.c_upper = b[1].get<double>();
    if (j.contains("cutoff")) w.cutoff = j.at("cutoff").get<double>() * kTwoPi;
    std::map<IVec3, Mat6cd> given;
    for (const auto& e : j.at("coefficients")) {
      const auto& g = e.at("G");
      if (!g.is_array() || g.size() != 3) throw MalformedCoefficients("G must be [n1, n2, n3]");
      IVec3 n{g[0].get<int>(), g[1].get<int>(), g[2].get<int>()};
      for (int i = w.lattice.dimension(); i < 3; ++i)
        if (n[i] != 0)
          throw MalformedCoefficients("G has a component along a suppressed axis");
      Eigen::MatrixXd re = read_matrix(e.at("re"), "re");
      Eigen::MatrixXd im =
          e.contains("im") ? read_matrix(e.at("im"), "im") : Eigen::MatrixXd::Zero(6, 6);
      Mat6cd c;
      for (int r = 0; r < 6; ++r)
        for (int k = 0; k < 6; ++k) c(r, k) = cd(re(r, k), im(r, k));
      if (given.count(n)) throw MalformedCoefficients("duplicate coefficient entry");
      given[n] = c;
    }
    if (given.empty()) throw MalformedCoefficients("no coefficients");
    w.coeffs = given;
    for (const auto& [n, c] : given)
      if (!given.count(negate(n))) w.coeffs[negate(n)] = c.adjoint();
  } catch (const json::exception& e) {
    throw MalformedCoefficients(std::string("weight document: ") + e.what());
  }
  if (w.cutoff) {
    for (const auto& [n, c] : w.coeffs)
      if (c.norm() != 0 && w.lattice.cartesian_G(n).norm() > *w.cutoff * (1 + 1e-12))
        throw MalformedCoefficients("nonzero coefficient outside the declared cutoff");
  }
  return w;
}

json weights_to_json(const MaterialWeights& w) {
  json j;
  j["lattice"] = lattice_to_json(w.lattice);
  j["bounds"] = {w.c_lower, w.c_upper};
  if (w.cutoff) j["cutoff"] = *w.cutoff / kTwoPi;
  json cs = json::array();
  // Non-Hermitian input keeps every entry so the file reproduces it.
  const bool hermitian = hermiticity_residual(w) == 0.0;
  for (const auto& [n, c] : w.coeffs) {
    if (hermitian && n < IVec3{0, 0, 0}) continue;
    cs.push_back({{"G", {n[0], n[1], n[2]}},
                  {"re", write_matrix(c.real())},
                  {"im", write_matrix(c.imag())}});
  }
  j["coefficients"] = cs;
  return j;
}

MaterialWeights load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open weight file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw MalformedCoefficients("'" + path + "': " + e.what());
  }
  return weights_from_json(j);
}

void save_weights(const MaterialWeights& w, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << std::setw(1) << weights_to_json(w) << "\n";
}

}  // namespace emtopo
