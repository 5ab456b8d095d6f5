#include "bpcl/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace bpcl {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
  return s.substr(b);
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidInput("malformed number in CSV: '" + s + "'");
  }
  if (trim(s.substr(used)).size() != 0) throw InvalidInput("malformed number in CSV: '" + s + "'");
  return v;
}

int depth_of(std::int64_t cells) {
  if (cells < 1 || (cells & (cells - 1)) != 0) throw InvalidInput("cell counts must be powers of two");
  int k = 0;
  while ((std::int64_t{1} << k) < cells) ++k;
  return k;
}

}  // namespace

void write_mesh_csv(std::ostream& os, const MeshFunction& f) {
  const auto& d = f.domain();
  os << std::setprecision(17);
  os << "axis1_cells,axis2_cells,origin1,origin2,extent1,extent2\n";
  os << d.cells(0) << ',' << d.cells(1) << ',' << d.origin[0] << ',' << d.origin[1] << ',' << d.extent[0] << ','
     << d.extent[1] << '\n';
  for (std::int64_t i1 = 0; i1 < f.n1(); ++i1) {
    for (std::int64_t i2 = 0; i2 < f.n2(); ++i2) {
      if (i2) os << ',';
      os << f(i1, i2).real() << ':' << f(i1, i2).imag();
    }
    os << '\n';
  }
}

void write_mesh_csv(const std::string& path, const MeshFunction& f) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open " + path + " for writing");
  write_mesh_csv(os, f);
}

MeshFunction read_mesh_csv(std::istream& is) {
  std::string line;
  auto next = [&]() {
    while (std::getline(is, line)) {
      line = trim(line);
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next()) throw InvalidInput("empty mesh CSV");
  if (line.rfind("axis1_cells", 0) == 0 && !next()) throw InvalidInput("mesh CSV lacks a header value line");
  const auto head = split(line, ',');
  if (head.size() != 6) throw InvalidInput("mesh CSV header must hold six values");
  BoxDomain d;
  const auto n1 = static_cast<std::int64_t>(parse_double(head[0]));
  const auto n2 = static_cast<std::int64_t>(parse_double(head[1]));
  d.depth = {depth_of(n1), depth_of(n2)};
  d.origin = {parse_double(head[2]), parse_double(head[3])};
  d.extent = {parse_double(head[4]), parse_double(head[5])};
  d.validate();
  MeshFunction f(d);
  for (std::int64_t i1 = 0; i1 < n1; ++i1) {
    if (!next()) throw InvalidInput("mesh CSV has fewer rows than declared");
    const auto cells = split(line, ',');
    if (static_cast<std::int64_t>(cells.size()) != n2) throw InvalidInput("mesh CSV row has the wrong length");
    for (std::int64_t i2 = 0; i2 < n2; ++i2) {
      const auto& c = cells[static_cast<std::size_t>(i2)];
      const auto colon = c.find(':');
      if (colon == std::string::npos) {
        f(i1, i2) = parse_double(c);
      } else {
        f(i1, i2) = Complex(parse_double(c.substr(0, colon)), parse_double(c.substr(colon + 1)));
      }
    }
  }
  if (next()) throw InvalidInput("mesh CSV has more rows than declared");
  return f;
}

MeshFunction read_mesh_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open " + path);
  return read_mesh_csv(is);
}

nlohmann::json to_json(const Complex& z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json to_json(const DyadicInterval& I) {
  return {{"axis", I.axis}, {"level", I.level}, {"index", I.index}};
}

nlohmann::json to_json(const DyadicRectangle& R) { return {{"I", to_json(R.I)}, {"J", to_json(R.J)}}; }

nlohmann::json to_json(const ExponentProfile& p) {
  return {{"p1", p.p1}, {"p2", p.p2}, {"q1", p.q1}, {"q2", p.q2}};
}

ExponentProfile profile_from_json(const nlohmann::json& j) {
  ExponentProfile p;
  p.p1 = j.at("p1").get<double>();
  p.p2 = j.at("p2").get<double>();
  p.q1 = j.at("q1").get<double>();
  p.q2 = j.at("q2").get<double>();
  p.validate();
  return p;
}

nlohmann::json to_json(const ModelOperatorSpec& s) {
  nlohmann::json j{{"kind", kind_name(s.kind)},
                   {"complexity", s.complexity},
                   {"seed", s.seed},
                   {"normalization", s.normalization}};
  if (s.kind == ModelKind::partial_paraproduct) {
    j["para_axis"] = s.para_axis;
    j["adjoint"] = s.adjoint;
  }
  if (s.kind == ModelKind::full_paraproduct) j["variant"] = s.full_variant;
  return j;
}

ModelOperatorSpec model_spec_from_json(const nlohmann::json& j) {
  ModelOperatorSpec s;
  s.kind = parse_kind(j.at("kind").get<std::string>());
  if (j.contains("complexity")) s.complexity = j.at("complexity").get<std::array<int, 4>>();
  s.seed = j.value("seed", std::uint64_t{0});
  s.normalization = j.value("normalization", 1.0);
  s.para_axis = j.value("para_axis", 0);
  s.adjoint = j.value("adjoint", false);
  s.full_variant = j.value("variant", 1);
  return s;
}

nlohmann::json sparse_tree_json(const SparseCollection& S) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : S.nodes) {
    nlohmann::json j{{"level", n.cube.level},
                     {"avg_abs", n.avg_abs},
                     {"piece_sup", n.piece_sup},
                     {"e_set_measure", n.e_measure},
                     {"generation", n.generation},
                     {"parent", n.parent}};
    if (S.field.grid.dim == 1) {
      j["index"] = n.cube.m1;
    } else {
      j["index"] = nlohmann::json::array({n.cube.m1, n.cube.m2});
    }
    nodes.push_back(std::move(j));
  }
  return {{"dim", S.field.grid.dim}, {"generations", S.generations}, {"nodes", nodes}};
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open " + path + " for writing");
  os << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open " + path);
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

}  // namespace bpcl
