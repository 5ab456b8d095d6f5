#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "bpcl/lattice.hpp"

namespace bpcl {

enum class HaarKind { cancellative, noncancellative };

struct HaarFunction {
  DyadicInterval interval;
  HaarKind kind = HaarKind::cancellative;
};

// Values of h_I on the cells of its axis.
std::vector<double> haar_values(const BoxDomain& d, const HaarFunction& h);
MeshFunction haar_product(const BoxDomain& d, const HaarFunction& h1, const HaarFunction& h2);

// Delta_I acting on the axis of I (pointwise in the other variable).
MeshFunction martingale_diff(const MeshFunction& f, const DyadicInterval& I);
// Delta_I Delta_J.
MeshFunction martingale_diff(const MeshFunction& f, const DyadicRectangle& R);
// <f>_{top} 1 + sum over intervals of Delta_I f, on one axis.
MeshFunction martingale_reconstruct(const MeshFunction& f, int axis);
// Product of the two one-axis expansions, including the mixed top terms.
MeshFunction martingale_reconstruct(const MeshFunction& f);

// Heap addressing of dyadic intervals at levels 0..L: id = 2^level - 1 + index.
inline std::int64_t heap_id(int level, std::int64_t index) { return (std::int64_t{1} << level) - 1 + index; }
inline std::int64_t heap_size(int depth) { return (std::int64_t{2} << depth) - 1; }

// Basis functions attached to a dyadic interval: h_I, 1_I/|I|, or 1_I.
enum class Basis { haar, average, indicator };

// One-axis tree transform: coefficient <u, phi_I> for every interval (haar entries at the finest level are 0).
std::vector<Complex> tree_analysis_1d(std::span<const Complex> u, double width, int depth, Basis basis);
// sum_I c_I phi_I evaluated on the cells.
std::vector<Complex> tree_synthesis_1d(std::span<const Complex> c, double width, int depth, Basis basis);

// Two-axis coefficient table indexed by (heap id on axis 0, heap id on axis 1).
struct DyadicTable {
  BoxDomain domain;
  std::int64_t ids1 = 0, ids2 = 0;
  std::vector<Complex> data;

  DyadicTable() = default;
  explicit DyadicTable(const BoxDomain& d)
      : domain(d), ids1(heap_size(d.depth[0])), ids2(heap_size(d.depth[1])),
        data(static_cast<std::size_t>(ids1 * ids2)) {}
  Complex& at(std::int64_t id1, std::int64_t id2) { return data[static_cast<std::size_t>(id1 * ids2 + id2)]; }
  const Complex& at(std::int64_t id1, std::int64_t id2) const {
    return data[static_cast<std::size_t>(id1 * ids2 + id2)];
  }
};

DyadicTable analyze(const MeshFunction& f, Basis b1, Basis b2);
MeshFunction synthesize(const DyadicTable& t, Basis b1, Basis b2);

enum class SquareKind { S, S1, S2 };
MeshFunction square_function(const MeshFunction& f, SquareKind which);

enum class MaximalKind { M1, M2, strong, fractional };

struct MaximalSpec {
  MaximalKind kind = MaximalKind::strong;
  double alpha = 0.0;
  // For the fractional kind: an axis, or nullopt for cubes of the (square) product.
  std::optional<int> axis;
};

MeshFunction maximal(const MeshFunction& f, const MaximalSpec& spec);

// One-parameter view: a line (dim 1) or a square mesh with dyadic cubes (dim 2).
struct CubeGrid {
  int dim = 1;
  int depth = 1;
  double extent = 1.0;
  std::array<double, 2> origin{0.0, 0.0};

  std::int64_t side() const { return std::int64_t{1} << depth; }
  std::size_t size() const { return static_cast<std::size_t>(dim == 1 ? side() : side() * side()); }
  double length(int level) const { return extent * std::ldexp(1.0, -level); }
  double cube_measure(int level) const { return dim == 1 ? length(level) : length(level) * length(level); }
  double cell_measure() const { return cube_measure(depth); }
  bool operator==(const CubeGrid&) const = default;
};

struct Cube {
  int level = 0;
  std::int64_t m1 = 0;
  std::int64_t m2 = 0;
  bool operator==(const Cube&) const = default;
};

struct CubeField {
  CubeGrid grid;
  std::vector<Complex> values;

  static CubeField from_line(const LineFunction& u);
  // Requires equal extents and depths on both axes.
  static CubeField from_mesh(const MeshFunction& f);
  // Restriction to one slice of a mesh along the given axis.
  static CubeField from_slice(const MeshFunction& f, int axis, std::int64_t slice);
  MeshFunction to_mesh() const;
  LineFunction to_line() const;
};

bool cube_contains_cell(const CubeGrid& g, const Cube& Q, std::size_t cell);
std::vector<std::size_t> cube_cells(const CubeGrid& g, const Cube& Q);

// Level-by-level sums of a nonnegative or complex field over every dyadic cube.
struct CubeSums {
  CubeGrid grid;
  std::vector<std::vector<Complex>> level_sums;  // level -> cube index (m1 * 2^level + m2)
  Complex sum(const Cube& Q) const;
  Complex average(const Cube& Q) const { return sum(Q) / grid.cube_measure(Q.level); }
};

CubeSums cube_sums(const CubeField& f);
CubeField cube_abs(const CubeField& f);

// sup over dyadic cubes Q containing the cell of l(Q)^alpha <|f|>_Q.
CubeField cube_maximal(const CubeField& f, double alpha = 0.0);
LineFunction maximal(const LineFunction& u, double alpha = 0.0);

struct SparseNode {
  Cube cube;
  int generation = 0;
  int parent = -1;
  std::vector<int> children;
  double measure = 0.0;
  double avg_abs = 0.0;
  Complex average;
  double piece_sup = 0.0;
  double e_measure = 0.0;
};

struct SparseCollection {
  CubeField field;
  Cube root;
  std::vector<SparseNode> nodes;
  int generations = 0;

  // f_P on the whole grid (zero off P).
  std::vector<Complex> piece(std::size_t node) const;
  // True when the given cell of P is outside every child of P.
  bool in_e_set(std::size_t node, std::size_t cell) const;
};

SparseCollection sparse_stopping(const CubeField& f, const Cube& root = {}, double mean_tolerance = 1e-10);
// max over cells of sum_P ||f_P||_inf^s 1_P / (M f)^s (M: dyadic maximal function of the field).
double sparse_domination_ratio(const SparseCollection& S, double s);

}  // namespace bpcl
