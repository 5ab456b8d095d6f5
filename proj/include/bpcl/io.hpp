#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "bpcl/dyadic.hpp"
#include "bpcl/lattice.hpp"
#include "bpcl/modelops.hpp"

namespace bpcl {

// Mesh CSV: a names line, a value line "cells1,cells2,origin1,origin2,extent1,extent2", then one row per
// x1-cell of re:im pairs. The reader accepts the value line with or without the names line.
void write_mesh_csv(std::ostream& os, const MeshFunction& f);
void write_mesh_csv(const std::string& path, const MeshFunction& f);
MeshFunction read_mesh_csv(std::istream& is);
MeshFunction read_mesh_csv(const std::string& path);

nlohmann::json to_json(const Complex& z);
nlohmann::json to_json(const DyadicInterval& I);
nlohmann::json to_json(const DyadicRectangle& R);
nlohmann::json to_json(const ExponentProfile& p);
ExponentProfile profile_from_json(const nlohmann::json& j);

// {kind, complexity, seed, normalization}, plus para_axis/adjoint/variant where they apply.
nlohmann::json to_json(const ModelOperatorSpec& s);
ModelOperatorSpec model_spec_from_json(const nlohmann::json& j);

// Per node {level, index, avg_abs, piece_sup, e_set_measure}.
nlohmann::json sparse_tree_json(const SparseCollection& S);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

}  // namespace bpcl
