#include "gabden/pointset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "gabden/errors.hpp"
#include "gabden/parallel.hpp"

namespace gabden {

namespace {

bool lex_less(const PhasePoint& a, const PhasePoint& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

Cube bounding_square(std::span<const PhasePoint> points) {
  if (points.empty()) return Cube{{0.0, 0.0}, 0.0};
  double x0 = points[0].x, x1 = x0, y0 = points[0].y, y1 = y0;
  for (const auto& p : points) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return Cube{{0.5 * (x0 + x1), 0.5 * (y0 + y1)}, 0.5 * std::min(x1 - x0, y1 - y0)};
}

// Event coordinates v +- R inside (lo, hi), the interval ends, and midpoints
// between consecutive events: every constant piece of the count is sampled.
std::vector<double> candidates(const std::vector<double>& values, double R, double lo, double hi) {
  std::vector<double> events{lo, hi};
  events.reserve(2 * values.size() + 2);
  for (double v : values) {
    for (double e : {v - R, v + R}) {
      if (e > lo && e < hi) events.push_back(e);
    }
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end(), [](double a, double b) { return b - a <= 1e-12; }),
               events.end());
  std::vector<double> out;
  out.reserve(2 * events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    out.push_back(events[i]);
    if (i + 1 < events.size()) out.push_back(0.5 * (events[i] + events[i + 1]));
  }
  return out;
}

bool contains_square(const Cube& outer, const Cube& inner) {
  return std::abs(inner.center.x - outer.center.x) + inner.half_side <= outer.half_side + kBoundaryTol &&
         std::abs(inner.center.y - outer.center.y) + inner.half_side <= outer.half_side + kBoundaryTol;
}

DensityReport profile(std::span<const PhasePoint> points, const Cube& window, std::span<const double> radii,
                      const Cube& search_region) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw ConfigError("density_profile needs positive, strictly increasing radii");
    }
  }
  DensityReport report;
  for (double R : radii) {
    const ExtremalCounts ec = extremal_counts(points, R, search_region);
    const double area = 4.0 * R * R;
    report.radii.push_back(R);
    report.max_counts.push_back(ec.max);
    report.min_counts.push_back(ec.min);
    report.normalized_max.push_back(static_cast<double>(ec.max) / area);
    report.normalized_min.push_back(static_cast<double>(ec.min) / area);
    report.truncated.push_back(
        !contains_square(window, Cube{search_region.center, search_region.half_side + R}));
  }
  return report;
}

}  // namespace

PointSet::PointSet(std::vector<PhasePoint> points, std::optional<double> declared_separation,
                   std::optional<Cube> window)
    : points_(std::move(points)), declared_separation_(declared_separation), window_(window) {
  for (const auto& p : points_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("point set contains a non-finite point");
  }
  std::vector<PhasePoint> sorted = points_;
  std::sort(sorted.begin(), sorted.end(), lex_less);
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("point set contains duplicated points");
  }
  if (declared_separation_) {
    if (!(*declared_separation_ > 0.0)) throw ConfigError("declared separation must be positive");
    const double actual = separation_constant(points_);
    if (actual < *declared_separation_ * (1.0 - 1e-12)) {
      std::ostringstream os;
      os << "points are " << actual << " apart, below the declared separation " << *declared_separation_;
      throw DomainError(os.str());
    }
  }
}

Cube PointSet::window() const { return window_ ? *window_ : bounding_square(points_); }

double Lattice2D::min_distance() const {
  auto dot = [](PhasePoint a, PhasePoint b) { return a.x * b.x + a.y * b.y; };
  PhasePoint a = v;
  PhasePoint b = w;
  if (dot(b, b) < dot(a, a)) std::swap(a, b);
  for (int iter = 0; iter < 200; ++iter) {
    const double mu = std::round(dot(a, b) / dot(a, a));
    b = {b.x - mu * a.x, b.y - mu * a.y};
    if (dot(b, b) >= dot(a, a)) break;
    std::swap(a, b);
  }
  return std::sqrt(dot(a, a));
}

std::vector<PhasePoint> PointFamily::merged() const {
  std::vector<PhasePoint> out;
  for (const auto& m : members_) out.insert(out.end(), m.points().begin(), m.points().end());
  return out;
}

Cube PointFamily::window() const {
  if (members_.empty()) return Cube{{0.0, 0.0}, 0.0};
  double x0 = -std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = std::numeric_limits<double>::infinity(), y1 = x1;
  for (const auto& m : members_) {
    const Cube w = m.window();
    x0 = std::max(x0, w.center.x - w.half_side);
    x1 = std::min(x1, w.center.x + w.half_side);
    y0 = std::max(y0, w.center.y - w.half_side);
    y1 = std::min(y1, w.center.y + w.half_side);
  }
  return Cube{{0.5 * (x0 + x1), 0.5 * (y0 + y1)}, std::max(0.0, 0.5 * std::min(x1 - x0, y1 - y0))};
}

void DensityReport::write_csv(std::ostream& out) const {
  const auto prec = out.precision(17);
  out << "R,max_count,min_count,norm_max,norm_min\n";
  for (std::size_t i = 0; i < radii.size(); ++i) {
    out << radii[i] << ',' << max_counts[i] << ',' << min_counts[i] << ',' << normalized_max[i] << ','
        << normalized_min[i] << '\n';
  }
  out.precision(prec);
}

Json DensityReport::to_json() const {
  Json rows = Json::array();
  for (std::size_t i = 0; i < radii.size(); ++i) {
    rows.push_back({{"R", radii[i]},
                    {"max_count", max_counts[i]},
                    {"min_count", min_counts[i]},
                    {"norm_max", normalized_max[i]},
                    {"norm_min", normalized_min[i]},
                    {"truncated", static_cast<bool>(truncated[i])}});
  }
  return Json{{"density_profile", rows}};
}

std::size_t count_in_cube(std::span<const PhasePoint> points, const Cube& q) {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [&](const PhasePoint& p) { return q.contains(p); }));
}

std::size_t count_in_cube(const PointSet& ps, const Cube& q) { return count_in_cube(ps.points(), q); }

ExtremalCounts extremal_counts(std::span<const PhasePoint> points, double R, const Cube& search_region) {
  if (!(R > 0.0)) throw ConfigError("extremal_counts needs R > 0");
  if (!(search_region.half_side >= 0.0)) throw ConfigError("search region needs a non-negative half-side");
  const PhasePoint c = search_region.center;
  const double h = search_region.half_side;
  ExtremalCounts result{0, 0, c, c};
  if (points.empty()) return result;

  const double reach = h + R + kBoundaryTol;
  std::vector<PhasePoint> relevant;
  for (const auto& p : points) {
    if (std::abs(p.x - c.x) <= reach && std::abs(p.y - c.y) <= reach) relevant.push_back(p);
  }
  std::sort(relevant.begin(), relevant.end(), lex_less);

  std::vector<double> xs;
  xs.reserve(relevant.size());
  for (const auto& p : relevant) xs.push_back(p.x);
  const std::vector<double> a_cands = candidates(xs, R, c.x - h, c.x + h);

  struct Local {
    std::size_t min = std::numeric_limits<std::size_t>::max();
    std::size_t max = 0;
    PhasePoint argmin;
    PhasePoint argmax;
  };
  std::vector<Local> per_candidate(a_cands.size());

  parallel_for(a_cands.size(), [&](std::size_t ia) {
    const double a = a_cands[ia];
    std::vector<double> ys;
    for (const auto& p : relevant) {
      if (std::abs(p.x - a) <= R + kBoundaryTol) ys.push_back(p.y);
    }
    std::sort(ys.begin(), ys.end());
    Local local;
    bool first = true;
    for (double b : candidates(ys, R, c.y - h, c.y + h)) {
      const auto lo = std::lower_bound(ys.begin(), ys.end(), b - R - kBoundaryTol);
      const auto hi = std::upper_bound(ys.begin(), ys.end(), b + R + kBoundaryTol);
      const auto count = static_cast<std::size_t>(hi - lo);
      if (first || count < local.min) {
        local.min = count;
        local.argmin = {a, b};
      }
      if (first || count > local.max) {
        local.max = count;
        local.argmax = {a, b};
      }
      first = false;
    }
    per_candidate[ia] = local;
  });

  result.min = std::numeric_limits<std::size_t>::max();
  result.max = 0;
  bool have_max = false;
  for (const auto& l : per_candidate) {
    if (l.min < result.min) {
      result.min = l.min;
      result.argmin = l.argmin;
    }
    if (!have_max || l.max > result.max) {
      result.max = l.max;
      result.argmax = l.argmax;
      have_max = true;
    }
  }
  return result;
}

ExtremalCounts extremal_counts(const PointSet& ps, double R, const Cube& search_region) {
  return extremal_counts(ps.points(), R, search_region);
}

DensityReport density_profile(const PointSet& ps, std::span<const double> radii, const Cube& search_region) {
  return profile(ps.points(), ps.window(), radii, search_region);
}

DensityReport density_profile(const PointFamily& family, std::span<const double> radii,
                              const Cube& search_region) {
  const std::vector<PhasePoint> merged = family.merged();
  return profile(merged, family.window(), radii, search_region);
}

double separation_constant(std::span<const PhasePoint> points) {
  if (points.size() < 2) return std::numeric_limits<double>::infinity();
  std::vector<PhasePoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), lex_less);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      const double dx = sorted[j].x - sorted[i].x;
      if (dx >= best) break;
      best = std::min(best, std::hypot(dx, sorted[j].y - sorted[i].y));
    }
  }
  return best;
}

double separation_constant(const PointSet& ps) { return separation_constant(ps.points()); }

PointSet lattice_points(const Lattice2D& lattice, const Cube& window) {
  const double det = lattice.det();
  if (!(std::abs(det) > 1e-12) || !std::isfinite(det)) throw DomainError("degenerate lattice (det = 0)");
  // (n, k) = M^{-1} p with M = [v w].
  auto coords = [&](double x, double y) {
    return std::pair{(lattice.w.y * x - lattice.w.x * y) / det, (-lattice.v.y * x + lattice.v.x * y) / det};
  };
  double n0 = std::numeric_limits<double>::infinity(), n1 = -n0, k0 = n0, k1 = -n0;
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      const auto [n, k] =
          coords(window.center.x + sx * window.half_side, window.center.y + sy * window.half_side);
      n0 = std::min(n0, n);
      n1 = std::max(n1, n);
      k0 = std::min(k0, k);
      k1 = std::max(k1, k);
    }
  }
  std::vector<PhasePoint> points;
  for (auto n = static_cast<long>(std::floor(n0)) - 1; n <= static_cast<long>(std::ceil(n1)) + 1; ++n) {
    for (auto k = static_cast<long>(std::floor(k0)) - 1; k <= static_cast<long>(std::ceil(k1)) + 1; ++k) {
      const PhasePoint p = lattice.at(n, k);
      if (window.contains(p)) points.push_back(p);
    }
  }
  std::sort(points.begin(), points.end(), lex_less);
  return PointSet(std::move(points), lattice.min_distance(), window);
}

double rho_alpha(double R, WeightExponent alpha) {
  if (!(R > 1.0)) throw ConfigError("rho_alpha needs R > 1");
  const double a = alpha.value();
  if (a < 2.0) return std::pow(R, 2.0 - a);
  if (a == 2.0) return std::log(R);
  return 1.0;
}

PointFamily angular_sector_family(int sectors, double half_width) {
  if (sectors < 1) throw ConfigError("sector family needs at least one sector");
  if (!(half_width >= 1.0)) throw ConfigError("sector family needs half_width >= 1");
  const auto L = static_cast<long>(std::floor(half_width));
  std::vector<std::vector<PhasePoint>> members(static_cast<std::size_t>(sectors));
  for (long x = -L; x <= L; ++x) {
    for (long y = -L; y <= L; ++y) {
      if (x == 0 && y == 0) continue;
      double arg = std::atan2(static_cast<double>(y), static_cast<double>(x));
      if (arg <= 0.0) arg += kTwoPi;
      const long n = std::clamp(static_cast<long>(std::ceil(arg * sectors / kTwoPi - 1e-12)), 1L,
                                static_cast<long>(sectors));
      members[static_cast<std::size_t>(n - 1)].push_back(
          {static_cast<double>(x), static_cast<double>(y - n)});
    }
  }
  const Cube window{{0.0, 0.0}, static_cast<double>(L - sectors)};
  std::vector<PointSet> sets;
  sets.reserve(members.size());
  for (auto& m : members) sets.emplace_back(std::move(m), std::nullopt, window);
  return PointFamily(std::move(sets));
}

PointSet read_points_csv(std::istream& in, std::optional<double> declared_separation) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("point CSV is empty");
  line.erase(std::remove_if(line.begin(), line.end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); }),
             line.end());
  if (line != "x,y") throw ConfigError("point CSV must start with the header 'x,y'");
  std::vector<PhasePoint> points;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    PhasePoint p;
    char comma = 0;
    if (!(row >> p.x >> comma >> p.y) || comma != ',') {
      throw ConfigError("malformed point CSV row " + std::to_string(lineno));
    }
    points.push_back(p);
  }
  return PointSet(std::move(points), declared_separation);
}

void write_points_csv(std::ostream& out, const PointSet& ps) {
  const auto prec = out.precision(17);
  out << "x,y\n";
  for (const auto& p : ps.points()) out << p.x << ',' << p.y << '\n';
  out.precision(prec);
}

}  // namespace gabden
