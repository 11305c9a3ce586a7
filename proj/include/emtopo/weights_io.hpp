#pragma once

#include <string>

#include <json.hpp>

#include "emtopo/weights.hpp"

namespace emtopo {

/// {"preset": name} or {"basis": [[x,y,z], ...]}.
Lattice lattice_from_json(const nlohmann::json& j);
nlohmann::json lattice_to_json(const Lattice& l);

/// Weight document: lattice, bounds [c, C], optional cutoff (units of 2pi/a),
/// and coefficients [{"G": [n1,n2,n3], "re": 6x6, "im": 6x6}]. Entries whose
/// -G partner is absent get What(-G) = What(G)^dag.
MaterialWeights weights_from_json(const nlohmann::json& j);
/// Writes G >= 0 (lexicographic) entries when the field is exactly Hermitian.
nlohmann::json weights_to_json(const MaterialWeights& w);

MaterialWeights load_weights(const std::string& path);
void save_weights(const MaterialWeights& w, const std::string& path);

}  // namespace emtopo
