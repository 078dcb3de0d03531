#pragma once

#include "conset/dynamics.hpp"
#include "conset/liealgebra.hpp"
#include "conset/model.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace conset {

enum class Manifold { Circle, ProjectiveLine, Box };

const char* to_string(Manifold m);

/// Congruent cells on S¹, ℙ¹ or a planar box. Circle cell k covers angles
/// [kδ, (k+1)δ) with δ = 2π/N; projective cells do the same on [0, π).
class CellGrid {
 public:
  static CellGrid circle(int cells);
  static CellGrid projective(int cells);
  static CellGrid box(Vector lower, Vector upper, std::vector<int> perAxis);

  Manifold manifold() const { return manifold_; }
  int size() const { return size_; }
  /// Cell diameter (arc length for 1-D grids).
  double resolution() const;
  bool one_dimensional() const { return manifold_ != Manifold::Box; }

  /// 2π for the circle, π for the projective line.
  double period() const;
  double cell_width() const { return period() / size_; }
  double cell_start(int k) const { return k * cell_width(); }
  int locate_angle(double theta) const;

  /// Cell containing the point, or −1 outside a box grid.
  int locate(const Vector& x) const;
  /// Center point (a unit vector for 1-D grids).
  Vector center(int k) const;
  std::vector<int> neighbors(int k) const;

  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const std::vector<int>& per_axis() const { return perAxis_; }

  bool operator==(const CellGrid& other) const;

 private:
  Manifold manifold_ = Manifold::Circle;
  int size_ = 0;
  Vector lower_, upper_;
  std::vector<int> perAxis_;
};

struct TransitionGraph {
  CellGrid grid;
  std::vector<Vector> controls;
  double tau = 0.0;
  /// Sorted successor lists. On box grids the extra node grid.size() is the
  /// unknown exterior; it has no successors.
  std::vector<std::vector<int>> edges;

  int nodes() const { return static_cast<int>(edges.size()); }
  int exterior() const { return grid.one_dimensional() ? -1 : grid.size(); }
  bool has_edge(int i, int j) const;
  TransitionGraph transpose() const;
};

/// 1-D grids: the edge set of a cell is the arc swept by its endpoints over
/// [0, τ], shrunk by 1e-9 δ and intersected with open cells. Box grids: center and four inset corners are integrated
/// with sub-steps no longer than the resolution, recording every cell visited.
TransitionGraph build_graph(const AffineSystem& sys, const CellGrid& grid, const std::vector<Vector>& controls,
                            double tau);

struct ConeLiftCertificate {
  Vector sPlus, sMinus;
  ControlSignal uPlus, uMinus;
  double sigmaPlus = 0.0, sigmaMinus = 0.0;
  double alphaPlus = 0.0, alphaMinus = 0.0;
  double residualPlus = 0.0, residualMinus = 0.0;
};

struct ControlSetResult {
  int id = 0;
  Manifold manifold = Manifold::Circle;
  std::vector<int> cells;
  /// Cells whose neighbors all belong to the set.
  std::vector<int> interiorCells;
  bool hasInterior = false;
  bool invariant = false;
  /// Box grids: some edge leaves to the unknown exterior.
  bool touchesExterior = false;
  std::optional<ConeLiftCertificate> certificate;

  bool contains(int cell) const;
};

/// Strongly connected components with at least two cells, sorted by size
/// (descending, then smallest cell). With a Lie basis, sets without a cell
/// whose center passes the projective accessibility check are dropped.
std::vector<ControlSetResult> find_control_sets(const TransitionGraph& g, const LieBasis* accessibility = nullptr);

/// Cell index ranges [first, last] with wrap-around merged on 1-D grids.
std::vector<std::pair<int, int>> cell_ranges(const ControlSetResult& cs, const CellGrid& grid);

struct PairingEntry {
  int projectiveSet = 0;
  std::vector<int> sphereSets;
  /// Two preimages that are exact antipodal images of each other.
  bool antipodal = false;
  /// One preimage that is its own antipode.
  bool singlePreimage = false;
};

struct PairingReport {
  std::vector<PairingEntry> entries;
  bool allAntipodal = true;
};

PairingReport pair_sphere_projective(const std::vector<ControlSetResult>& circleSets, const CellGrid& circle,
                                     const std::vector<ControlSetResult>& projSets, const CellGrid& projective);

/// Arc (start, end) in radians covered by a 1-D set, or nullopt if the set
/// covers the whole manifold.
std::optional<std::pair<double, double>> set_arc(const ControlSetResult& cs, const CellGrid& grid);

}  // namespace conset
