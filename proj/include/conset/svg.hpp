#pragma once

#include "conset/equilibria.hpp"
#include "conset/reachability.hpp"

#include <string>
#include <vector>

namespace conset {

/// Unit circle (or the upper half for ℙ¹) with control-set arcs shaded;
/// invariant sets drawn solid, variant sets dashed.
std::string control_sets_svg(const CellGrid& grid, const std::vector<ControlSetResult>& sets);

/// Box grid with control-set cells filled.
std::string box_sets_svg(const CellGrid& grid, const std::vector<ControlSetResult>& sets);

/// Equilibrium branches x_u in the plane (n = 2), or ‖x_u‖ against the path
/// parameter otherwise.
std::string branches_svg(const BranchTrace& trace, int dim);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace conset
