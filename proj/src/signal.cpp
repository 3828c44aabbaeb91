#include "gabden/signal.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "gabden/errors.hpp"

namespace gabden {

namespace {

// Points closer than this to a jump are treated as lying on it.
constexpr double kJumpTol = 1e-9;
constexpr double kTruncationTol = 1e-10;

std::size_t node_count(double half_width, double step) {
  return static_cast<std::size_t>(std::floor(2.0 * half_width / step + 1e-9)) + 1;
}

double box(double t, double lo, double hi) {
  if (std::abs(t - lo) <= kJumpTol || std::abs(t - hi) <= kJumpTol) return 0.5;
  return (t > lo && t < hi) ? 1.0 : 0.0;
}

double hermite_function(int order, double t) {
  double prev = 0.0;
  double cur = std::pow(kPi, -0.25) * std::exp(-0.5 * t * t);
  for (int k = 0; k < order; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * t * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-12; }

void require_resolution(const Preset& preset, const TimeGrid& grid) {
  switch (preset.kind) {
    case PresetKind::gaussian:
    case PresetKind::hermite:
      if (grid.step() > 0.25) {
        throw ResolutionError(preset.describe() + " needs step <= 0.25, got " + std::to_string(grid.step()));
      }
      break;
    case PresetKind::modulated_indicator:
      if (grid.step() * std::max(1.0, std::abs(preset.params[0])) > 0.25) {
        throw ResolutionError(preset.describe() + " is under-resolved at step " + std::to_string(grid.step()));
      }
      break;
    case PresetKind::indicator:
      break;
  }
}

}  // namespace

TimeGrid::TimeGrid(double half_width, double step)
    : half_width_(half_width), step_(step), count_(0) {
  if (!(step > 0.0) || !(half_width > 0.0) || !std::isfinite(step) || !std::isfinite(half_width)) {
    throw ConfigError("time grid needs positive finite half_width and step");
  }
  count_ = node_count(half_width, step);
  if (count_ < 2) throw ConfigError("time grid needs at least two nodes");
}

TimeGrid::TimeGrid(double half_width, double step, std::size_t count)
    : half_width_(half_width), step_(step), count_(count) {}

TimeGrid TimeGrid::midpoint(double extent, double step) {
  if (!(step > 0.0) || !(extent > step)) throw ConfigError("midpoint grid needs extent > step > 0");
  const auto cells = static_cast<std::size_t>(std::llround(2.0 * extent / step));
  return TimeGrid(0.5 * static_cast<double>(cells - 1) * step, step, cells);
}

TimeGrid TimeGrid::centered(std::size_t count, double step) {
  if (count < 2 || !(step > 0.0)) throw ConfigError("centered grid needs count >= 2 and step > 0");
  return TimeGrid(0.5 * static_cast<double>(count - 1) * step, step, count);
}

TimeGrid default_time_grid() { return TimeGrid::midpoint(12.0, 0.01); }

PresetKind parse_preset_kind(const std::string& name) {
  if (name == "gaussian") return PresetKind::gaussian;
  if (name == "indicator") return PresetKind::indicator;
  if (name == "hermite") return PresetKind::hermite;
  if (name == "modulated_indicator") return PresetKind::modulated_indicator;
  throw ConfigError("unknown preset kind '" + name + "'");
}

std::string to_string(PresetKind kind) {
  switch (kind) {
    case PresetKind::gaussian: return "gaussian";
    case PresetKind::indicator: return "indicator";
    case PresetKind::hermite: return "hermite";
    case PresetKind::modulated_indicator: return "modulated_indicator";
  }
  return "unknown";
}

std::string Preset::describe() const {
  std::ostringstream os;
  os << to_string(kind) << '[';
  for (std::size_t i = 0; i < params.size(); ++i) os << (i ? "," : "") << params[i];
  os << ']';
  return os.str();
}

void validate(const Preset& preset) {
  const auto& p = preset.params;
  for (double v : p) {
    if (!std::isfinite(v)) throw ConfigError(preset.describe() + ": non-finite parameter");
  }
  switch (preset.kind) {
    case PresetKind::gaussian:
      if (!p.empty()) throw ConfigError("gaussian takes no parameters");
      break;
    case PresetKind::indicator:
      if (p.size() == 1) {
        if (!(p[0] > 0.0)) throw ConfigError("indicator half-width must be positive");
      } else if (p.size() == 2) {
        if (!(p[1] > p[0])) throw ConfigError("indicator needs lo < hi");
      } else {
        throw ConfigError("indicator takes [a] or [lo, hi]");
      }
      break;
    case PresetKind::hermite:
      if (p.size() != 1 || !is_integer(p[0]) || p[0] < 0.0) {
        throw ConfigError("hermite takes one non-negative integer order");
      }
      break;
    case PresetKind::modulated_indicator:
      if (p.size() != 1 || !is_integer(p[0])) {
        throw ConfigError("modulated_indicator takes one integer frequency");
      }
      break;
  }
}

complex evaluate(const Preset& preset, double t) {
  const auto& p = preset.params;
  switch (preset.kind) {
    case PresetKind::gaussian: {
      static const double c = std::pow(2.0 / kPi, 0.25);
      return {c * std::exp(-t * t), 0.0};
    }
    case PresetKind::indicator:
      return p.size() == 1 ? complex(box(t, -p[0], p[0]), 0.0) : complex(box(t, p[0], p[1]), 0.0);
    case PresetKind::hermite:
      return {hermite_function(static_cast<int>(std::lround(p[0])), t), 0.0};
    case PresetKind::modulated_indicator: {
      const double b = box(t, 0.0, 1.0);
      if (b == 0.0) return {0.0, 0.0};
      return b * std::polar(1.0, kTwoPi * p[0] * t);
    }
  }
  return {0.0, 0.0};
}

complex AnalyticForm::operator()(double t) const {
  const complex base = evaluate(preset, t - shift);
  if (base == complex(0.0, 0.0)) return base;
  return freq == 0.0 ? scale * base : scale * std::polar(1.0, kTwoPi * freq * t) * base;
}

AnalyticForm AnalyticForm::translated_modulated(double a, double b) const {
  AnalyticForm out = *this;
  out.shift = shift + a;
  out.freq = freq + b;
  out.scale = scale * std::polar(1.0, -kTwoPi * freq * a);
  return out;
}

SampledSignal::SampledSignal(TimeGrid grid, std::vector<complex> values, std::optional<AnalyticForm> form)
    : grid_(grid), values_(std::move(values)), form_(std::move(form)) {
  if (values_.size() != grid_.count()) throw ConfigError("sample count does not match the grid");
  for (const auto& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericalError("non-finite sample");
  }
}

SampledSignal SampledSignal::zero(const TimeGrid& grid) {
  return SampledSignal(grid, std::vector<complex>(grid.count()));
}

WeightExponent::WeightExponent(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("weight exponent alpha must be positive");
}

SampledSignal make_preset(const Preset& preset, const TimeGrid& grid) {
  validate(preset);
  require_resolution(preset, grid);
  AnalyticForm form{preset};
  std::vector<complex> values(grid.count());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = form(grid.node(k));
  return SampledSignal(grid, std::move(values), std::move(form));
}

SampledSignal make_preset(PresetKind kind, std::vector<double> params, const TimeGrid& grid) {
  return make_preset(Preset{kind, std::move(params)}, grid);
}

complex inner_product(const SampledSignal& f, const SampledSignal& g) {
  if (!(f.grid() == g.grid())) throw GridMismatchError();
  complex acc{0.0, 0.0};
  const auto fv = f.values();
  const auto gv = g.values();
  for (std::size_t k = 0; k < fv.size(); ++k) acc += fv[k] * std::conj(gv[k]);
  return acc * f.grid().step();
}

double norm_sq(const SampledSignal& f) {
  double acc = 0.0;
  for (const auto& v : f.values()) acc += std::norm(v);
  return acc * f.grid().step();
}

SampledSignal translate_modulate(const SampledSignal& g, double a, double b) {
  const TimeGrid& grid = g.grid();
  const auto src = g.values();

  // Energy of g whose shifted position leaves the grid.
  double total = 0.0;
  double lost = 0.0;
  for (std::size_t k = 0; k < src.size(); ++k) {
    const double e = std::norm(src[k]);
    total += e;
    const double moved = grid.node(k) + a;
    if (moved < grid.first() - 0.5 * grid.step() || moved > grid.last() + 0.5 * grid.step()) lost += e;
  }
  if (total > 0.0 && lost > kTruncationTol * total) {
    std::ostringstream os;
    os << "shift by " << a << " moves a fraction " << lost / total << " of the energy off the grid";
    throw TruncationError(os.str());
  }

  std::vector<complex> out(grid.count());
  if (g.analytic()) {
    AnalyticForm form = g.analytic()->translated_modulated(a, b);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = form(grid.node(k));
    return SampledSignal(grid, std::move(out), std::move(form));
  }

  const double last_index = static_cast<double>(grid.count() - 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double t = grid.node(k);
    const double pos = (t - a - grid.first()) / grid.step();
    complex v{0.0, 0.0};
    if (pos >= 0.0 && pos <= last_index) {
      const auto j = static_cast<std::size_t>(std::floor(pos));
      const double frac = pos - static_cast<double>(j);
      v = j + 1 < src.size() ? (1.0 - frac) * src[j] + frac * src[j + 1] : src[j];
    }
    out[k] = b == 0.0 ? v : std::polar(1.0, kTwoPi * b * t) * v;
  }
  return SampledSignal(grid, std::move(out));
}

SampledSignal linear_combination(std::span<const complex> coeffs, std::span<const SampledSignal> signals) {
  if (coeffs.size() != signals.size() || signals.empty()) {
    throw ConfigError("linear_combination needs matching, non-empty inputs");
  }
  const TimeGrid& grid = signals.front().grid();
  std::vector<complex> out(grid.count());
  for (std::size_t i = 0; i < signals.size(); ++i) {
    if (!(signals[i].grid() == grid)) throw GridMismatchError();
    const auto v = signals[i].values();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += coeffs[i] * v[k];
  }
  return SampledSignal(grid, std::move(out));
}

SampledSignal fourier_transform(const SampledSignal& g) {
  const TimeGrid& grid = g.grid();
  if (grid.step() > 0.1) throw ResolutionError("fourier_transform needs step <= 0.1");
  const std::size_t n = grid.count();
  const TimeGrid freq = TimeGrid::centered(n, 1.0 / (static_cast<double>(n) * grid.step()));
  const auto src = g.values();
  std::vector<complex> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double w = freq.node(j);
    complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      if (src[k] == complex(0.0, 0.0)) continue;
      acc += src[k] * std::polar(1.0, -kTwoPi * w * grid.node(k));
    }
    out[j] = acc * grid.step();
  }
  return SampledSignal(freq, std::move(out));
}

double weighted_norm_sq(const SampledSignal& f, WeightExponent alpha) {
  const auto v = f.values();
  double acc = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    acc += std::pow(std::abs(f.grid().node(k)), alpha.value()) * std::norm(v[k]);
  }
  return acc * f.grid().step();
}

void write_csv(std::ostream& out, const SampledSignal& f) {
  const auto prec = out.precision(17);
  out << "t,re,im\n";
  for (std::size_t k = 0; k < f.size(); ++k) {
    out << f.grid().node(k) << ',' << f[k].real() << ',' << f[k].imag() << '\n';
  }
  out.precision(prec);
}

}  // namespace gabden
