#ifndef GABDEN_PHASE_HPP
#define GABDEN_PHASE_HPP

#include <cmath>
#include <cstddef>

namespace gabden {

/// A point (x, y) of the time-frequency plane.
struct PhasePoint {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const PhasePoint&) const = default;
};

/// Absolute slack used for closed-boundary membership tests.
inline constexpr double kBoundaryTol = 1e-9;

/// Closed square {|x - a| <= R, |y - b| <= R}.
struct Cube {
  PhasePoint center;
  double half_side = 1.0;

  bool contains(const PhasePoint& p) const {
    return std::abs(p.x - center.x) <= half_side + kBoundaryTol &&
           std::abs(p.y - center.y) <= half_side + kBoundaryTol;
  }
  double area() const { return 4.0 * half_side * half_side; }
};

/// Nodes low, low+step, ... up to high inclusive. count() == 0 marks an empty axis.
struct Axis {
  double low = 0.0;
  double high = -1.0;
  double step = 1.0;

  std::size_t count() const {
    if (!(high >= low) || !(step > 0.0)) return 0;
    return static_cast<std::size_t>(std::floor((high - low) / step + 1e-9)) + 1;
  }
  double node(std::size_t i) const { return low + static_cast<double>(i) * step; }
};

/// Rectangular phase-space grid; values are stored x-major: index = i * ny + j.
struct PhaseGrid {
  Axis x;
  Axis y;

  static PhaseGrid square(double half_side, double step) {
    return PhaseGrid{{-half_side, half_side, step}, {-half_side, half_side, step}};
  }
  static PhaseGrid around(const Cube& cube, double step) {
    return PhaseGrid{{cube.center.x - cube.half_side, cube.center.x + cube.half_side, step},
                     {cube.center.y - cube.half_side, cube.center.y + cube.half_side, step}};
  }

  std::size_t nx() const { return x.count(); }
  std::size_t ny() const { return y.count(); }
  std::size_t size() const { return nx() * ny(); }
  bool empty() const { return size() == 0; }
  PhasePoint node(std::size_t i, std::size_t j) const { return {x.node(i), y.node(j)}; }
  double cell_area() const { return x.step * y.step; }
};

}  // namespace gabden

#endif  // GABDEN_PHASE_HPP
