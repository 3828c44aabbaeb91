#include "gabden/stft.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

#include "gabden/errors.hpp"
#include "gabden/parallel.hpp"

namespace gabden {

namespace {

const double kWindowScale = std::pow(2.0 / kPi, 0.25);

// Beyond this distance phi^2 < 1e-70; such samples contribute nothing in double precision.
constexpr double kWindowReach = 9.0;
constexpr double kWindowTruncationTol = 1e-8;

// Fraction of phi's energy beyond distance d from its centre, on one side.
double window_tail(double d) { return d <= 0.0 ? 0.5 : 0.5 * std::erfc(std::sqrt(2.0) * d); }

void require_window_on_grid(const TimeGrid& grid, double x) {
  const double lo = grid.first() - 0.5 * grid.step();
  const double hi = grid.last() + 0.5 * grid.step();
  const double lost = window_tail(x - lo) + window_tail(hi - x);
  if (lost > kWindowTruncationTol) {
    std::ostringstream os;
    os << "window centred at x = " << x << " leaves the time grid (lost energy " << lost << ")";
    throw TruncationError(os.str());
  }
}

// Cell-overlap weights of axis cells against [lo, hi]: full cells [first, last]
// plus fractional end cells.
struct Coverage {
  bool empty = true;
  std::size_t first = 0;
  std::size_t last = 0;
  double first_weight = 1.0;
  double last_weight = 1.0;
};

double cell_overlap(const Axis& axis, std::size_t i, double lo, double hi) {
  const double c = axis.node(i);
  const double h = axis.step;
  const double ov = std::min(hi, c + 0.5 * h) - std::max(lo, c - 0.5 * h);
  return std::clamp(ov / h, 0.0, 1.0);
}

Coverage coverage(const Axis& axis, std::size_t n, double lo, double hi) {
  Coverage cov;
  if (n == 0 || !(hi > lo)) return cov;
  const double x0 = axis.low;
  const double h = axis.step;
  const double a = std::ceil((lo - x0) / h - 0.5 - 1e-12);
  const double b = std::floor((hi - x0) / h + 0.5 + 1e-12);
  const double max_index = static_cast<double>(n - 1);
  if (b < 0.0 || a > max_index || a > b) return cov;
  cov.first = static_cast<std::size_t>(std::max(a, 0.0));
  cov.last = static_cast<std::size_t>(std::min(b, max_index));
  cov.first_weight = cell_overlap(axis, cov.first, lo, hi);
  cov.last_weight = cell_overlap(axis, cov.last, lo, hi);
  cov.empty = false;
  return cov;
}

struct Term {
  std::size_t a;
  std::size_t b;
  double coeff;
};

std::vector<Term> terms(const Coverage& c) {
  if (c.empty) return {};
  if (c.first == c.last) return {{c.first, c.first, c.first_weight}};
  return {{c.first, c.last, 1.0}, {c.first, c.first, c.first_weight - 1.0}, {c.last, c.last, c.last_weight - 1.0}};
}

}  // namespace

double window_value(double t) { return kWindowScale * std::exp(-t * t); }

SampledSignal window(const TimeGrid& grid) { return make_preset(PresetKind::gaussian, {}, grid); }

complex stft_point(const SampledSignal& g, PhasePoint p) {
  const TimeGrid& grid = g.grid();
  require_window_on_grid(grid, p.x);
  const auto v = g.values();
  const double h = grid.step();
  const auto k0 = static_cast<std::size_t>(std::max(0.0, std::floor((p.x - kWindowReach - grid.first()) / h)));
  const auto k1 = static_cast<std::size_t>(
      std::clamp(std::ceil((p.x + kWindowReach - grid.first()) / h), 0.0, static_cast<double>(v.size() - 1)));
  complex acc{0.0, 0.0};
  for (std::size_t k = k0; k <= k1 && k < v.size(); ++k) {
    if (v[k] == complex(0.0, 0.0)) continue;
    const double t = grid.node(k);
    acc += v[k] * window_value(t - p.x) * std::polar(1.0, -kTwoPi * p.y * t);
  }
  return acc * h;
}

complex gaussian_ambiguity(PhasePoint p) {
  return std::polar(std::exp(-0.5 * p.x * p.x - 0.5 * kPi * kPi * p.y * p.y), -kPi * p.x * p.y);
}

complex gaussian_atom_stft(double lambda, double mu, PhasePoint p) {
  return std::polar(1.0, -kTwoPi * lambda * (p.y - mu)) * gaussian_ambiguity({p.x - lambda, p.y - mu});
}

STFTField::STFTField(PhaseGrid grid, std::vector<complex> values, std::shared_ptr<const SampledSignal> source,
                     std::string description)
    : grid_(grid), values_(std::move(values)), source_(std::move(source)), description_(std::move(description)) {
  if (values_.size() != grid_.size()) throw ConfigError("field value count does not match its grid");
}

double STFTField::norm_sq() const {
  double acc = 0.0;
  for (const auto& v : values_) acc += std::norm(v);
  return acc * grid_.cell_area();
}

void STFTField::write_csv(std::ostream& out) const {
  const auto prec = out.precision(17);
  out << "x,y,re,im,modulus\n";
  for (std::size_t i = 0; i < grid_.nx(); ++i) {
    for (std::size_t j = 0; j < grid_.ny(); ++j) {
      const complex v = at(i, j);
      out << grid_.x.node(i) << ',' << grid_.y.node(j) << ',' << v.real() << ',' << v.imag() << ','
          << std::abs(v) << '\n';
    }
  }
  out.precision(prec);
}

Json STFTField::to_json() const {
  Json out;
  out["source"] = description_;
  out["grid"] = {{"x", {grid_.x.low, grid_.x.high, grid_.x.step}},
                 {"y", {grid_.y.low, grid_.y.high, grid_.y.step}},
                 {"nx", grid_.nx()},
                 {"ny", grid_.ny()}};
  Json values = Json::array();
  for (const auto& v : values_) values.push_back({v.real(), v.imag()});
  out["values"] = std::move(values);
  return out;
}

STFTField stft_field(const SampledSignal& g, const PhaseGrid& grid) {
  auto source = std::make_shared<const SampledSignal>(g);
  const std::string description =
      g.analytic() ? "V_phi " + g.analytic()->preset.describe() : std::string("V_phi <sampled signal>");
  if (grid.empty()) return STFTField(grid, {}, source, description);

  const TimeGrid& tg = g.grid();
  const std::size_t nx = grid.nx();
  const std::size_t ny = grid.ny();
  const std::size_t nt = tg.count();
  for (std::size_t i = 0; i < nx; ++i) require_window_on_grid(tg, grid.x.node(i));

  Eigen::MatrixXcd modulations(nt, ny);
  for (std::size_t k = 0; k < nt; ++k) {
    const double t = tg.node(k);
    for (std::size_t j = 0; j < ny; ++j) {
      modulations(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
          std::polar(1.0, -kTwoPi * grid.y.node(j) * t);
    }
  }

  const auto v = g.values();
  std::vector<complex> values(nx * ny);
  constexpr std::size_t kBlock = 32;
  const std::size_t blocks = (nx + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t i0 = b * kBlock;
    const std::size_t rows = std::min(kBlock, nx - i0);
    Eigen::MatrixXcd windowed(rows, nt);
    for (std::size_t r = 0; r < rows; ++r) {
      const double x = grid.x.node(i0 + r);
      for (std::size_t k = 0; k < nt; ++k) {
        windowed(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = v[k] * window_value(tg.node(k) - x);
      }
    }
    const Eigen::MatrixXcd block = windowed * modulations * tg.step();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < ny; ++j) {
        values[(i0 + r) * ny + j] = block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
      }
    }
  });
  return STFTField(grid, std::move(values), std::move(source), description);
}

VerificationReport check_covariance(const SampledSignal& g, PhasePoint shift,
                                    std::span<const PhasePoint> sample_points) {
  VerificationReport report("covariance");
  report.set_input("signal", g.analytic() ? g.analytic()->preset.describe() : "sampled");
  report.set_input("shift", {shift.x, shift.y});
  report.set_input("sample_points", sample_points.size());

  const SampledSignal shifted = translate_modulate(g, shift.x, shift.y);
  double worst = 0.0;
  for (const auto& p : sample_points) {
    const double lhs = std::abs(stft_point(shifted, p));
    const double rhs = std::abs(stft_point(g, {p.x - shift.x, p.y - shift.y}));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  report.add_check("max_modulus_discrepancy", worst, 1e-5, Relation::at_most);
  return report;
}

WeightedFieldNorm weighted_field_norm_sq(const STFTField& field, WeightExponent alpha) {
  WeightedFieldNorm out;
  if (field.empty()) return out;
  const PhaseGrid& grid = field.grid();
  const double a = alpha.value();
  const double cx = 0.5 * (grid.x.low + grid.x.high);
  const double cy = 0.5 * (grid.y.low + grid.y.high);
  const double inner_hx = 0.375 * (grid.x.high - grid.x.low);
  const double inner_hy = 0.375 * (grid.y.high - grid.y.low);
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    const double x = grid.x.node(i);
    const double wx = std::pow(std::abs(x), a);
    for (std::size_t j = 0; j < grid.ny(); ++j) {
      const double y = grid.y.node(j);
      const double term = (wx + std::pow(std::abs(y), a)) * std::norm(field.at(i, j));
      out.value += term;
      if (std::abs(x - cx) <= inner_hx && std::abs(y - cy) <= inner_hy) out.inner_value += term;
    }
  }
  out.value *= grid.cell_area();
  out.inner_value *= grid.cell_area();
  out.converged = out.value <= 0.0 || std::abs(out.value - out.inner_value) <= 1e-2 * out.value;
  return out;
}

double weighted_transfer_bound(const SampledSignal& g, WeightExponent alpha) {
  const double c = std::max(1.0, std::pow(2.0, alpha.value() - 1.0));
  const SampledSignal phi = window(g.grid());
  const SampledSignal g_hat = fourier_transform(g);
  const SampledSignal phi_hat = fourier_transform(phi);
  const double time_side = norm_sq(g) * weighted_norm_sq(phi, alpha) + norm_sq(phi) * weighted_norm_sq(g, alpha);
  const double freq_side =
      norm_sq(g_hat) * weighted_norm_sq(phi_hat, alpha) + norm_sq(phi_hat) * weighted_norm_sq(g_hat, alpha);
  return c * (time_side + freq_side);
}

FieldMass::FieldMass(const STFTField& field)
    : x_(field.grid().x), y_(field.grid().y), nx_(field.grid().nx()), ny_(field.grid().ny()) {
  prefix_.assign((nx_ + 1) * (ny_ + 1), 0.0);
  const double area = field.grid().cell_area();
  for (std::size_t i = 0; i < nx_; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < ny_; ++j) {
      const double e = std::norm(field.at(i, j));
      if (i == 0 || j == 0 || i + 1 == nx_ || j + 1 == ny_) boundary_max_ = std::max(boundary_max_, e);
      row += e * area;
      prefix_[(i + 1) * (ny_ + 1) + (j + 1)] = prefix_[i * (ny_ + 1) + (j + 1)] + row;
    }
  }
  total_ = prefix_.back();
}

double FieldMass::rect(std::size_t i0, std::size_t i1, std::size_t j0, std::size_t j1) const {
  const std::size_t w = ny_ + 1;
  return prefix_[(i1 + 1) * w + (j1 + 1)] - prefix_[i0 * w + (j1 + 1)] - prefix_[(i1 + 1) * w + j0] +
         prefix_[i0 * w + j0];
}

double FieldMass::in_cube(const Cube& cube) const {
  const auto cx = coverage(x_, nx_, cube.center.x - cube.half_side, cube.center.x + cube.half_side);
  const auto cy = coverage(y_, ny_, cube.center.y - cube.half_side, cube.center.y + cube.half_side);
  double acc = 0.0;
  for (const auto& tx : terms(cx)) {
    for (const auto& ty : terms(cy)) {
      if (tx.coeff == 0.0 || ty.coeff == 0.0) continue;
      acc += tx.coeff * ty.coeff * rect(tx.a, tx.b, ty.a, ty.b);
    }
  }
  return acc;
}

double FieldMass::covered_half_side() const {
  if (nx_ == 0 || ny_ == 0) return 0.0;
  const double hx = 0.5 * x_.step;
  const double hy = 0.5 * y_.step;
  return std::min({-(x_.low - hx), x_.node(nx_ - 1) + hx, -(y_.low - hy), y_.node(ny_ - 1) + hy});
}

}  // namespace gabden
