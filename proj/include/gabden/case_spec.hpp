#ifndef GABDEN_CASE_SPEC_HPP
#define GABDEN_CASE_SPEC_HPP

#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>
#include <variant>

#include "gabden/phase.hpp"
#include "gabden/pointset.hpp"
#include "gabden/report.hpp"
#include "gabden/signal.hpp"
#include "gabden/theorems.hpp"

namespace gabden {

namespace cfg {

void require_object(const Json& j, const std::string& what);
/// Rejects keys outside the list.
void allow_keys(const Json& j, const std::string& what, std::initializer_list<const char*> keys);
const Json& need(const Json& j, const std::string& key, const std::string& what);
double number(const Json& j, const std::string& what);
std::vector<double> numbers(const Json& j, const std::string& what);
std::optional<double> optional_number(const Json& j, const std::string& key, const std::string& what);

}  // namespace cfg

/// JSON readers for run configs. Every reader throws ConfigError naming the
/// offending key; relative file paths resolve against `base`.

/// "gaussian" or {"kind": "hermite", "params": [1]}.
Preset parse_preset(const Json& j);
/// {"center": [x, y], "half_side": R}.
Cube parse_cube(const Json& j);
PhasePoint parse_point(const Json& j);
std::vector<PhasePoint> parse_points(const Json& j);
/// {"half_side": H, "step": h} (square) or {"x": [lo, hi, step], "y": [lo, hi, step]}.
PhaseGrid parse_phase_grid(const Json& j);
Lattice2D parse_lattice(const Json& j);

/// Point sources:
///   {"kind": "list", "points": [[x, y], ...]}
///   {"kind": "file", "path": "pts.csv"}
///   {"kind": "lattice", "v": [..], "w": [..], "window": cube}
///   {"kind": "sectors", "sectors": N, "half_width": L}
///   {"kind": "family", "members": [source, ...]}
/// with optional "declared_separation" and "window" on list and file sources.
using PointSource = std::variant<PointSet, Lattice2D, PointFamily>;
PointSource parse_point_source(const Json& j, const std::filesystem::path& base);
/// Point source that must resolve to a single finite set (lattices need a window).
PointSet parse_point_set(const Json& j, const std::filesystem::path& base);

QuadratureParams parse_quadrature(const Json& j, QuadratureParams defaults = {});

/// {"name", "generators": [preset...], "points": source, "radii": [...],
///  "hypothesis", "search_region"?, "alpha"?, "dual_bound"?, "time_grid"?, "quadrature"?}
CaseSpec parse_case(const Json& j, const std::filesystem::path& base, const QuadratureParams& defaults = {});

}  // namespace gabden

#endif  // GABDEN_CASE_SPEC_HPP
