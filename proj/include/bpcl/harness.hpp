#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpcl/kernels.hpp"
#include "bpcl/lattice.hpp"
#include "bpcl/modelops.hpp"
#include "bpcl/norms.hpp"

namespace bpcl {

// global: b constant. x1_slices: every fixed-x1 slice b(x1, .) is constant in x2. x2_slices: every fixed-x2
// slice b(., x2) is constant in x1.
enum class ConstancyMode { none, global, x1_slices, x2_slices };
std::string mode_name(ConstancyMode m);

enum class FunctionalKind { zero, little_bmo, holder, inf_const, double_sparse };

struct FunctionalSpec {
  FunctionalKind kind = FunctionalKind::zero;
  std::string name;
  int axis = 0;                // holder
  double alpha = 0.0;          // holder
  MixedNormSpec mixed;         // inf_const
  std::array<double, 2> r{0, 0};  // double_sparse
};

struct CaseInfo {
  std::string key;    // e.g. "lt_eq": relation on axis 0, then axis 1
  std::string label;  // e.g. "p1<q1,p2=q2"
  std::string statement;
  std::array<Relation, 2> relation{Relation::equal, Relation::equal};
  ConstancyMode constancy = ConstancyMode::none;
  FunctionalSpec lower, upper;
  bool equivalence = false;  // lower and upper are the same functional
  bool open_gap = false;
  bool sigma = false;        // the off-support proxy is the finite-family variant
};

CaseInfo classify_case(const ExponentProfile& profile);
// Every case key in table order (rows: relation on axis 1; columns: relation on axis 0).
std::vector<std::string> case_keys();
// A representative profile for a case key.
ExponentProfile representative_profile(const std::string& key);

// Largest mean oscillation over the slices of the mode (or the whole box); 0 iff b has the required constancy.
double constancy_defect(const MeshFunction& b, ConstancyMode mode);

struct HarnessBudgets {
  int rect_depth = -1;  // deepest rectangle level for the bmo scan (negative: mesh depth)
  int trials = 12;      // random commutator trials for the model proxy
  std::size_t max_rectangles = 256;
  int sigma_bases = 8;
  int sigma_families = 4;
  int sparse_candidates = 6;
  double A = 8.0;
};

double evaluate_functional(const MeshFunction& b, const FunctionalSpec& f, const HarnessBudgets& budgets,
                           std::uint64_t seed);

// sup over stopping-generated sparse pairs (S1 on axis 0, S2 on axis 1) of the double sparse functional, with the
// coefficients improved by alternating Holder-extremal updates.
double double_sparse_sup(const MeshFunction& b, double r1, double r2, int candidates, std::uint64_t seed);

struct ScalingRow {
  int level = 0;
  double ell = 0.0;
  double osc = 0.0;
  double scaled = 0.0;  // osc / (|I|^{a1} |J|^{a2})
  double bound = 0.0;   // O |I|^{a1} |J|^{a2} when O is known
};

// Nested intervals on one axis through a fixed cell, crossed with the full other axis. A finite O forces
// osc <= O |I|^{a1} |J|^{a2}; a fitted slope on the wrong side of the exponent shows that the scaled oscillation
// is unbounded along the sequence.
struct ScalingWitness {
  int axis = 1;
  double exponent = 0.0;  // 1/p - 1/q on the axis
  double slope = 0.0;     // least-squares slope of log osc against log ell
  bool divergent = false;
  double o_value = 0.0;
  std::vector<ScalingRow> rows;
};

ScalingWitness scaling_witness(const MeshFunction& b, const ExponentProfile& profile, int axis, double o_value = 0.0);
// Requires p2 < q2; shrinks J on axis 1 and compares against the measured off-support norm.
ScalingWitness lebesgue_shrink_test(const MeshFunction& b, const KernelSpec& K, const ExponentProfile& profile,
                                    const OffSupportConfig& cfg);

// Random model commutators of complexity <= 1: max of ||[b,S]f||_{q1,q2} / ||f||_{p1,p2}.
double model_proxy(const MeshFunction& b, const ExponentProfile& profile, int trials, std::uint64_t seed);
// O for cells without p_i > q_i, otherwise the finite-family variant over seeded bases.
double offsupport_proxy(const MeshFunction& b, const KernelSpec& K, const ExponentProfile& profile,
                        const CaseInfo& info, const HarnessBudgets& budgets, std::uint64_t seed);

// Upper/lower limits loaded from the frozen band file; a missing entry means "not asserted".
class Bands {
 public:
  Bands() = default;
  explicit Bands(nlohmann::json data) : data_(std::move(data)) {}
  static Bands load(const std::string& path);
  bool has(const std::string& name) const;
  std::optional<double> upper(const std::string& name) const;
  std::optional<double> lower(const std::string& name) const;
  const nlohmann::json& data() const { return data_; }

 private:
  const nlohmann::json* find(const std::string& name) const;
  nlohmann::json data_ = nlohmann::json::object();
};

struct BandCheck {
  std::string name;
  double value = 0.0;
  std::optional<double> band;
  bool asserted = false;
  bool pass = true;
};

struct CaseReport {
  CaseInfo info;
  ExponentProfile profile;
  std::string symbol;
  double lower = 0.0, upper = 0.0;
  double n_off = 0.0, n_model = 0.0;
  double defect = 0.0;
  bool admissible = true;
  std::vector<ScalingWitness> witnesses;
  bool divergent = false;
  std::optional<double> gap_ratio;  // upper / lower in the open cells
  std::vector<BandCheck> checks;
  bool pass = true;

  nlohmann::json to_json() const;
};

// Band-checked ratios for one symbol. Without bands the ratios are reported but not asserted.
CaseReport two_sided_report(const MeshFunction& b, const KernelSpec& K, const ExponentProfile& profile,
                            const HarnessBudgets& budgets, std::uint64_t seed, const Bands* bands = nullptr,
                            const std::string& symbol_name = "");

// Symbols: constant, coord:x1, coord:x2, coord:x1+x2, haar:levels, csv:path.
MeshFunction make_symbol(const nlohmann::json& symbol, const BoxDomain& d);
std::string symbol_label(const nlohmann::json& symbol);
// The five canonical symbols of the smoke suite.
std::vector<nlohmann::json> canonical_symbols();

KernelSpec make_kernel(const nlohmann::json& kernel);

struct RunConfig {
  BoxDomain domain = BoxDomain::square(1.0, 7);
  nlohmann::json kernel = {{"name", "tensor_hilbert"}, {"params", nlohmann::json::object()}};
  nlohmann::json symbol = {{"kind", "coord:x1"}, {"params", nlohmann::json::object()}};
  ExponentProfile profile;
  double A = 8.0;
  HarnessBudgets budgets;

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

}  // namespace bpcl
