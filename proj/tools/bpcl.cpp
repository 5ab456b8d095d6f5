#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bpcl/awf.hpp"
#include "bpcl/dyadic.hpp"
#include "bpcl/harness.hpp"
#include "bpcl/io.hpp"
#include "bpcl/modelops.hpp"
#include "bpcl/norms.hpp"
#include "bpcl/sweeps.hpp"

#ifndef BPCL_ORACLE_DIR
#define BPCL_ORACLE_DIR "oracles"
#endif

namespace {

using bpcl::Complex;
using nlohmann::json;

struct Globals {
  std::uint64_t seed = 0;
  std::optional<int> depth;
  std::optional<double> box;
  std::string out;
};

void emit(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    bpcl::write_json(out, j);
  }
}

std::string default_oracles() {
  if (std::filesystem::exists("oracles/bands.json")) return "oracles";
  return BPCL_ORACLE_DIR;
}

bpcl::RunConfig load_config(const std::string& path, const Globals& g) {
  json j = path.empty() ? json::object() : bpcl::read_json(path);
  if (g.depth || g.box) {
    auto& d = j["domain"];
    if (!d.is_object()) d = json::object();
    if (g.depth) d["depth"] = *g.depth;
    if (g.box) d["extent"] = *g.box;
  }
  return bpcl::RunConfig::from_json(j);
}

// Fields are split on ':', each after the first being key=value.
struct Selector {
  std::string name;
  std::map<std::string, std::string> args;
  double num(const std::string& k, double dflt) const {
    auto it = args.find(k);
    return it == args.end() ? dflt : std::stod(it->second);
  }
};

std::vector<Selector> parse_which(const std::string& which) {
  std::vector<Selector> out;
  std::stringstream ss(which);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::stringstream is(item);
    std::string tok;
    Selector s;
    std::getline(is, s.name, ':');
    while (std::getline(is, tok, ':')) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw bpcl::InvalidInput("selector argument lacks '=': " + tok);
      s.args[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    out.push_back(std::move(s));
  }
  return out;
}

// Axes on the command line are numbered from 1.
int cli_axis(const Selector& s) {
  const int a = static_cast<int>(s.num("axis", 1));
  if (a != 1 && a != 2) throw bpcl::InvalidInput("axis must be 1 or 2");
  return a - 1;
}

int cli_axis_named(const Selector& s, const std::string& key) {
  const int a = static_cast<int>(s.num(key, 1));
  if (a != 1 && a != 2) throw bpcl::InvalidInput(key + " must be 1 or 2");
  return a - 1;
}

json rect_json(const bpcl::RectangleSup& r) { return {{"value", r.value}, {"argmax", bpcl::to_json(r.argmax)}}; }

int run_norms(const std::string& input, const std::string& which, const std::string& config, const Globals& g) {
  const auto b = bpcl::read_mesh_csv(input);
  const auto cfg = load_config(config, Globals{});
  const auto K = bpcl::make_kernel(cfg.kernel);
  json rep = json::object();
  for (const auto& s : parse_which(which)) {
    std::string key = s.name;
    for (const auto& [k, v] : s.args) key += ":" + k + "=" + v;
    if (s.name == "bmo") {
      rep[key] = rect_json(bpcl::little_bmo(b, static_cast<int>(s.num("max_level", -1))));
    } else if (s.name == "holder") {
      rep[key] = {{"value", bpcl::holder_seminorm(b, s.num("alpha", 0.5), cli_axis(s))}};
    } else if (s.name == "ap") {
      rep[key] = rect_json(bpcl::ap_characteristic(b, s.num("p", 2.0)));
    } else if (s.name == "inf") {
      bpcl::MixedNormSpec spec{cli_axis_named(s, "outer"), s.num("p_outer", 2.0), s.num("p_inner", 2.0)};
      const auto r = bpcl::inf_const_mixed_norm(b, spec);
      rep[key] = {{"value", r.value}, {"argmin", bpcl::to_json(r.argmin)}};
    } else if (s.name == "offsupport") {
      bpcl::ExponentProfile p{s.num("p1", 2), s.num("p2", 2), s.num("q1", 2), s.num("q2", 2)};
      p.validate();
      bpcl::OffSupportConfig oc;
      oc.A = s.num("A", 8.0);
      oc.max_rectangles = static_cast<std::size_t>(s.num("max_rectangles", 256));
      oc.seed = g.seed;
      const auto r = bpcl::offsupport_norm(b, K, p, oc);
      rep[key] = {{"value", r.value},
                  {"argmax", bpcl::to_json(r.argmax)},
                  {"argmax_reflected", bpcl::to_json(r.argmax_reflected)},
                  {"rectangles", r.rectangles}};
    } else if (s.name == "defect") {
      const std::string mode = s.args.count("mode") ? s.args.at("mode") : "global";
      bpcl::ConstancyMode m = bpcl::ConstancyMode::global;
      if (mode == "x1_slices") m = bpcl::ConstancyMode::x1_slices;
      else if (mode == "x2_slices") m = bpcl::ConstancyMode::x2_slices;
      else if (mode != "global") throw bpcl::InvalidInput("unknown constancy mode: " + mode);
      rep[key] = {{"value", bpcl::constancy_defect(b, m)}};
    } else {
      throw bpcl::InvalidInput("unknown functional: " + s.name);
    }
  }
  emit(rep, g.out);
  return 0;
}

bpcl::CubeField field_of(const bpcl::MeshFunction& f) {
  const auto& d = f.domain();
  if (d.depth[0] == 0) {
    bpcl::LineFunction u(bpcl::axis_line(d, 1));
    for (std::int64_t i = 0; i < d.cells(1); ++i) u.values[static_cast<std::size_t>(i)] = f(0, i);
    return bpcl::CubeField::from_line(u);
  }
  if (d.depth[1] == 0) {
    bpcl::LineFunction u(bpcl::axis_line(d, 0));
    for (std::int64_t i = 0; i < d.cells(0); ++i) u.values[static_cast<std::size_t>(i)] = f(i, 0);
    return bpcl::CubeField::from_line(u);
  }
  return bpcl::CubeField::from_mesh(f);
}

int run_sparse(const std::string& input, bool center, const Globals& g) {
  auto field = field_of(bpcl::read_mesh_csv(input));
  if (center) {
    Complex m = 0.0;
    for (auto z : field.values) m += z;
    m /= static_cast<double>(field.values.size());
    for (auto& z : field.values) z -= m;
  }
  const auto S = bpcl::sparse_stopping(field);
  emit(bpcl::sparse_tree_json(S), g.out);
  return 0;
}

bpcl::DyadicRectangle awf_rectangle(const json& cfg, const bpcl::RunConfig& rc) {
  if (cfg.contains("awf") && cfg["awf"].contains("R")) {
    const auto r = cfg["awf"]["R"].get<std::vector<std::int64_t>>();
    if (r.size() != 4) throw bpcl::InvalidInput("awf.R must be [level1, index1, level2, index2]");
    return bpcl::make_rectangle(static_cast<int>(r[0]), r[1], static_cast<int>(r[2]), r[3]);
  }
  const int k = bpcl::min_reflectable_level(rc.A);
  return bpcl::make_rectangle(k, 0, k, 0);
}

int run_awf(const std::string& config, const Globals& g) {
  const json raw = config.empty() ? json::object() : bpcl::read_json(config);
  const auto rc = load_config(config, g);
  const auto K = bpcl::make_kernel(rc.kernel);
  const auto b = bpcl::make_symbol(rc.symbol, rc.domain);
  const auto R = awf_rectangle(raw, rc);
  bpcl::AwfConfig ac;
  ac.A = rc.A;
  const auto c = bpcl::osc_lower_bound_certificate(b, K, R, ac);
  emit({{"R", bpcl::to_json(R)},
        {"Rt", bpcl::to_json(c.Rt)},
        {"A", c.A},
        {"residual", c.residual},
        {"rho", c.rho},
        {"lhs", c.lhs},
        {"rhs", c.rhs},
        {"ratio", c.ratio}},
       g.out);
  return 0;
}

int run_model(const std::string& spec_path, const std::string& input, const std::string& csv, const Globals& g) {
  auto spec = bpcl::model_spec_from_json(bpcl::read_json(spec_path));
  const auto d = bpcl::BoxDomain::square(g.box.value_or(1.0), g.depth.value_or(6));
  bpcl::MeshFunction f(d);
  if (input.empty()) {
    bpcl::random_inputs::Rng rng(g.seed);
    f = bpcl::random_inputs::test_function(rng, d, 0);
  } else {
    f = bpcl::read_mesh_csv(input);
  }
  const auto S = bpcl::ModelOperator::generate(spec, f.domain());
  const auto Sf = bpcl::apply_model(S, f);
  if (!csv.empty()) bpcl::write_mesh_csv(csv, Sf);
  json ratios = json::object();
  for (auto [p1, p2] : {std::pair{2.0, 2.0}, std::pair{2.0, 3.0}, std::pair{3.0, 2.0}}) {
    const double den = bpcl::mixed_norm(f, p1, p2);
    std::ostringstream k;
    k << "p" << p1 << p2;
    ratios[k.str()] = den > 0.0 ? bpcl::mixed_norm(Sf, p1, p2) / den : 0.0;
  }
  emit({{"spec", bpcl::to_json(spec)},
        {"coefficients", S.coefficients().size()},
        {"max_level", {S.max_level(0), S.max_level(1)}},
        {"norm_ratio", ratios}},
       g.out);
  return 0;
}

int run_report(const std::string& config, const std::string& bands_path, bool all, const Globals& g) {
  const auto bands = bpcl::Bands::load(bands_path.empty() ? default_oracles() + "/bands.json" : bands_path);
  const auto rc = load_config(config, g);
  const auto K = bpcl::make_kernel(rc.kernel);
  bool pass = true;
  if (!all) {
    const auto b = bpcl::make_symbol(rc.symbol, rc.domain);
    const auto rep = bpcl::two_sided_report(b, K, rc.profile, rc.budgets, g.seed, &bands, bpcl::symbol_label(rc.symbol));
    emit(rep.to_json(), g.out);
    return rep.pass ? 0 : 1;
  }
  json reps = json::array();
  for (const auto& key : bpcl::case_keys()) {
    const auto profile = bpcl::representative_profile(key);
    for (const auto& sym : bpcl::canonical_symbols()) {
      const auto rep = bpcl::two_sided_report(bpcl::make_symbol(sym, rc.domain), K, profile, rc.budgets, g.seed,
                                              &bands, bpcl::symbol_label(sym));
      std::cerr << (rep.pass ? "PASS " : "FAIL ") << key << ' ' << bpcl::symbol_label(sym) << '\n';
      pass = pass && rep.pass;
      reps.push_back(rep.to_json());
    }
  }
  emit({{"reports", reps}, {"pass", pass}}, g.out);
  return pass ? 0 : 1;
}

int run_bands(bool regenerate, const std::string& dir_arg, const std::string& group, const Globals& g) {
  const std::string dir = dir_arg.empty() ? default_oracles() : dir_arg;
  if (regenerate) {
    std::filesystem::create_directories(dir);
    const auto doc = bpcl::regenerate_bands(bpcl::sweep_seeds(), [](const std::string& id) {
      std::cerr << "sweeping " << id << '\n';
    });
    bpcl::write_json(dir + "/bands.json", doc);
    bpcl::write_golden_csv(dir + "/sio_golden.csv", bpcl::compute_sio_golden());
    std::cerr << "wrote " << dir << "/bands.json and " << dir << "/sio_golden.csv\n";
    return 0;
  }
  const auto bands = bpcl::Bands::load(dir + "/bands.json");
  bool pass = true;
  json out = json::array();
  for (const auto& grp : bpcl::band_groups()) {
    if (!group.empty() && grp.id != group) continue;
    for (const auto& v : bpcl::check_group(bands, grp.id, g.seed)) {
      pass = pass && v.pass;
      json e{{"name", v.name}, {"min", v.measured.min}, {"max", v.measured.max}, {"pass", v.pass}};
      if (v.upper) e["upper"] = *v.upper;
      if (v.lower) e["lower"] = *v.lower;
      out.push_back(e);
      std::cerr << (v.pass ? "PASS " : "FAIL ") << v.name << '\n';
    }
  }
  emit({{"seed", g.seed}, {"checks", out}, {"pass", pass}}, g.out);
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bi-parameter commutator toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "random seed")->default_val(0);
  app.add_option("--depth", g.depth, "mesh depth per axis");
  app.add_option("--box", g.box, "box extent per axis");
  app.add_option("--out", g.out, "output path (stdout when absent)");

  std::string config, input, which = "bmo", spec, csv, bands_path, dir, group;
  bool center = false, all = false, regenerate = false;

  auto* awf = app.add_subcommand("awf", "oscillation certificate from the weak factorization");
  awf->add_option("--config", config, "run configuration JSON");

  auto* norms = app.add_subcommand("norms", "functionals of a symbol");
  norms->add_option("--input", input, "symbol mesh CSV")->required();
  norms->add_option("--which", which, "comma-separated selectors such as bmo,holder:alpha=0.5:axis=2,ap:p=2");
  norms->add_option("--config", config, "run configuration JSON (kernel)");

  auto* sparse = app.add_subcommand("sparse", "stopping-time sparse tree");
  sparse->add_option("--input", input, "function mesh CSV")->required();
  sparse->add_flag("--center", center, "subtract the mean first");

  auto* model = app.add_subcommand("model", "apply a dyadic model operator");
  model->add_option("--spec", spec, "model spec JSON")->required();
  model->add_option("--input", input, "function mesh CSV (random when absent)");
  model->add_option("--csv", csv, "write S f to this mesh CSV");

  auto* report = app.add_subcommand("report", "two-sided report against the frozen bands");
  report->add_option("--config", config, "run configuration JSON");
  report->add_option("--bands", bands_path, "band file");
  report->add_flag("--all", all, "every table cell on the canonical symbols");

  auto* bands = app.add_subcommand("bands", "regenerate or check the frozen constants");
  bands->add_flag("--regenerate", regenerate, "rerun the sweeps and rewrite the oracle files");
  bands->add_option("--dir", dir, "oracle directory");
  bands->add_option("--group", group, "check one group only");

  for (auto* sub : {awf, norms, sparse, model, report, bands}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*awf) return run_awf(config, g);
    if (*norms) return run_norms(input, which, config, g);
    if (*sparse) return run_sparse(input, center, g);
    if (*model) return run_model(spec, input, csv, g);
    if (*report) return run_report(config, bands_path, all, g);
    if (*bands) return run_bands(regenerate, dir, group, g);
  } catch (const bpcl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
