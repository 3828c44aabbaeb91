#ifndef GABDEN_POINTSET_HPP
#define GABDEN_POINTSET_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "gabden/phase.hpp"
#include "gabden/report.hpp"
#include "gabden/signal.hpp"

namespace gabden {

/// A finite index set in the phase plane.
///
/// `declared_separation`, when present, is a lower bound for every pairwise
/// distance. `window` is the square inside which the set is known to be
/// complete (for truncations of infinite sets); it defaults to the largest square
/// centred in the bounding box that fits inside it.
class PointSet {
 public:
  PointSet() = default;
  /// Throws DomainError for duplicated points or a violated declared separation.
  explicit PointSet(std::vector<PhasePoint> points, std::optional<double> declared_separation = std::nullopt,
                    std::optional<Cube> window = std::nullopt);

  std::span<const PhasePoint> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::optional<double>& declared_separation() const { return declared_separation_; }
  /// Declared window or the default square described above.
  Cube window() const;

 private:
  std::vector<PhasePoint> points_;
  std::optional<double> declared_separation_;
  std::optional<Cube> window_;
};

/// Lambda = {n v + k w : (n, k) in Z^2}.
struct Lattice2D {
  PhasePoint v{1.0, 0.0};
  PhasePoint w{0.0, 1.0};

  double det() const { return v.x * w.y - v.y * w.x; }
  /// Length of the shortest non-zero lattice vector (Lagrange reduction).
  double min_distance() const;
  PhasePoint at(long n, long k) const {
    return {static_cast<double>(n) * v.x + static_cast<double>(k) * w.x,
            static_cast<double>(n) * v.y + static_cast<double>(k) * w.y};
  }
};

class PointFamily {
 public:
  PointFamily() = default;
  explicit PointFamily(std::vector<PointSet> members) : members_(std::move(members)) {}

  std::span<const PointSet> members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  /// All member points concatenated (a multiset); cube counts of the union
  /// equal the sum of member counts.
  std::vector<PhasePoint> merged() const;
  /// Intersection of the member windows.
  Cube window() const;

 private:
  std::vector<PointSet> members_;
};

struct ExtremalCounts {
  std::size_t min = 0;
  std::size_t max = 0;
  PhasePoint argmin;
  PhasePoint argmax;
};

struct DensityReport {
  std::vector<double> radii;
  std::vector<std::size_t> max_counts;
  std::vector<std::size_t> min_counts;
  std::vector<double> normalized_max;
  std::vector<double> normalized_min;
  /// Entry i is true when some cube of radius radii[i] centred in the search
  /// region pokes out of the data window.
  std::vector<bool> truncated;

  /// Columns R,max_count,min_count,norm_max,norm_min.
  void write_csv(std::ostream& out) const;
  Json to_json() const;
};

/// |Lambda cap Q| with a closed boundary.
std::size_t count_in_cube(std::span<const PhasePoint> points, const Cube& q);
std::size_t count_in_cube(const PointSet& ps, const Cube& q);

/// Exact min and max of |Lambda cap Q_(a,b)(R)| over all centres (a, b) in the
/// search region. The count is piecewise constant between the events lambda +- R in
/// each coordinate, so it suffices to evaluate it at every event and at every
/// midpoint between consecutive events (and the region edges). For each x
/// candidate the y problem is a sorted one-dimensional window count.
ExtremalCounts extremal_counts(std::span<const PhasePoint> points, double R, const Cube& search_region);
ExtremalCounts extremal_counts(const PointSet& ps, double R, const Cube& search_region);

DensityReport density_profile(const PointSet& ps, std::span<const double> radii, const Cube& search_region);
/// Family version: counts are summed over members at a common centre.
DensityReport density_profile(const PointFamily& family, std::span<const double> radii, const Cube& search_region);

/// Minimum pairwise Euclidean distance; +inf for fewer than two points.
double separation_constant(std::span<const PhasePoint> points);
double separation_constant(const PointSet& ps);

/// Lattice points inside the window, sorted by (x, y). Throws DomainError for a
/// degenerate lattice.
PointSet lattice_points(const Lattice2D& lattice, const Cube& window);

/// R^{2-a} for 0 < a < 2, log R for a = 2, 1 for a > 2. Requires R > 1.
double rho_alpha(double R, WeightExponent alpha);

/// Sector family: Lambda*_n = {z in Z^2 cap window : Arg z in (2 pi (n-1)/N, 2 pi n/N]},
/// shifted to Lambda_n = Lambda*_n - (0, n). The origin has no argument and is left out.
PointFamily angular_sector_family(int sectors, double half_width);

/// CSV with header `x,y`.
PointSet read_points_csv(std::istream& in, std::optional<double> declared_separation = std::nullopt);
void write_points_csv(std::ostream& out, const PointSet& ps);

}  // namespace gabden

#endif  // GABDEN_POINTSET_HPP
