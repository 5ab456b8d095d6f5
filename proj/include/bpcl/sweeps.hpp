#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpcl/harness.hpp"
#include "bpcl/lattice.hpp"
#include "bpcl/modelops.hpp"

namespace bpcl {

struct SampleRange {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  void add(double v);
  void merge(const SampleRange& o);
};

struct GroupSample {
  std::map<std::string, SampleRange> ranges;
  nlohmann::json log = nlohmann::json::array();
};

// A family of frozen constants measured together. Upper limits are max * margin; two-sided groups also get
// min / margin. Envelope groups hold names ending in ".m<k>" and take their limits from a degree-2 polynomial
// in k through the running maxima over complexities <= k, raised until no measurement lies above it.
struct BandGroup {
  std::string id;
  std::string description;
  bool two_sided = false;
  bool envelope = false;
  double margin = 1.25;
  std::function<GroupSample(std::uint64_t seed)> measure;
};

const std::vector<BandGroup>& band_groups();
const BandGroup& band_group(const std::string& id);

struct BandVerdict {
  std::string name;
  SampleRange measured;
  std::optional<double> lower, upper;
  bool pass = false;
};

// Runs one group at a seed and compares every measured range with the frozen limits. Names without a frozen
// entry fail.
std::vector<BandVerdict> check_group(const Bands& bands, const std::string& id, std::uint64_t seed);

// Runs every group at each seed, freezes the limits, and returns the band document.
nlohmann::json regenerate_bands(const std::vector<std::uint64_t>& seeds,
                                const std::function<void(const std::string&)>& log = {});

// Seeds the frozen bands were swept with; tests draw from a disjoint range.
std::vector<std::uint64_t> sweep_seeds();

// Golden rows (case_id, value, tolerance) recomputed from the library.
struct GoldenRow {
  std::string case_id;
  Complex value;
  double tolerance = 0.0;
};
std::vector<GoldenRow> compute_sio_golden();
void write_golden_csv(const std::string& path, const std::vector<GoldenRow>& rows);
std::vector<GoldenRow> read_golden_csv(const std::string& path);

// Random inputs shared by the sweeps and the tests.
namespace random_inputs {

using Rng = std::mt19937_64;

// Mixture of smooth trigonometric, dyadic step and coordinate-product symbols.
MeshFunction symbol(Rng& rng, const BoxDomain& d);
// Function of one coordinate only (axis 0: b(x1), axis 1: b(x2)), rough with Holder exponent about alpha.
MeshFunction one_axis_symbol(Rng& rng, const BoxDomain& d, int axis, double alpha);
LineFunction holder_line(Rng& rng, const LineDomain& d, double alpha);
// Gaussian, heavy-tailed or indicator test functions, chosen by the trial index.
MeshFunction test_function(Rng& rng, const BoxDomain& d, int trial);
LineFunction line_function(Rng& rng, const LineDomain& d, int trial);
// Mean-zero bounded function supported in the given rectangle.
MeshFunction mean_zero_on(Rng& rng, const BoxDomain& d, const DyadicRectangle& R);
// Uniform levels in [lo, hi] and uniform indices, redrawn until the reflection at A fits in the box.
DyadicRectangle random_reflectable(Rng& rng, const BoxDomain& d, const KernelSpec& K, double A, int lo, int hi);
// Random variant of the kind whose largest complexity entry is m.
ModelOperatorSpec random_model(Rng& rng, ModelKind kind, int m);
ModelOperatorSpec random_small_model(Rng& rng);

}  // namespace random_inputs

}  // namespace bpcl
