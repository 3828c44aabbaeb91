#ifndef GABDEN_SIGNAL_HPP
#define GABDEN_SIGNAL_HPP

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gabden {

using complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Uniform grid t_k = -T + k*step, k = 0..count-1, on the real line.
class TimeGrid {
 public:
  /// count = floor(2T/step) + 1.
  TimeGrid(double half_width, double step);

  /// Nodes at the cell midpoints of [-extent, extent]; jumps at multiples of
  /// `step` then fall between nodes and midpoint sums integrate them exactly.
  static TimeGrid midpoint(double extent, double step);

  /// Symmetric grid with a prescribed node count.
  static TimeGrid centered(std::size_t count, double step);

  double half_width() const { return half_width_; }
  double step() const { return step_; }
  std::size_t count() const { return count_; }
  double node(std::size_t k) const { return -half_width_ + static_cast<double>(k) * step_; }
  double first() const { return -half_width_; }
  double last() const { return node(count_ - 1); }

  bool operator==(const TimeGrid& other) const = default;

 private:
  TimeGrid(double half_width, double step, std::size_t count);
  double half_width_;
  double step_;
  std::size_t count_;
};

/// Midpoint grid on [-12, 12] with step 0.01.
TimeGrid default_time_grid();

enum class PresetKind { gaussian, indicator, hermite, modulated_indicator };

PresetKind parse_preset_kind(const std::string& name);
std::string to_string(PresetKind kind);

/// gaussian: []          -> (2/pi)^{1/4} e^{-t^2}
/// indicator: [a]        -> 1_[-a,a];  [lo, hi] -> 1_[lo,hi]
/// hermite: [k]          -> k-th L2-normalized Hermite function
/// modulated_indicator: [n] -> e^{2 pi i n t} 1_[0,1]
struct Preset {
  PresetKind kind = PresetKind::gaussian;
  std::vector<double> params;

  std::string describe() const;
  bool operator==(const Preset&) const = default;
};

/// Validates params for the kind; throws ConfigError.
void validate(const Preset& preset);

/// Evaluates the (unshifted) preset at t. Jump points take the average of
/// the one-sided limits.
complex evaluate(const Preset& preset, double t);

/// Closed form scale * e^{2 pi i freq t} * preset(t - shift).
struct AnalyticForm {
  Preset preset;
  double shift = 0.0;
  double freq = 0.0;
  complex scale{1.0, 0.0};

  complex operator()(double t) const;
  /// Form of M_b T_a applied to this function.
  AnalyticForm translated_modulated(double a, double b) const;
};

/// Complex samples of a function on a TimeGrid. When the samples came from a
/// preset the closed form rides along, so shifts re-evaluate analytically.
class SampledSignal {
 public:
  SampledSignal(TimeGrid grid, std::vector<complex> values,
                std::optional<AnalyticForm> form = std::nullopt);

  static SampledSignal zero(const TimeGrid& grid);

  const TimeGrid& grid() const { return grid_; }
  std::span<const complex> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  complex operator[](std::size_t k) const { return values_[k]; }
  const std::optional<AnalyticForm>& analytic() const { return form_; }

 private:
  TimeGrid grid_;
  std::vector<complex> values_;
  std::optional<AnalyticForm> form_;
};

class WeightExponent {
 public:
  explicit WeightExponent(double alpha);
  double value() const { return alpha_; }

 private:
  double alpha_;
};

/// Samples a preset. Throws ResolutionError when the grid cannot resolve it.
SampledSignal make_preset(const Preset& preset, const TimeGrid& grid);
SampledSignal make_preset(PresetKind kind, std::vector<double> params, const TimeGrid& grid);

/// Riemann sum sum_k f(t_k) conj(g(t_k)) step.
complex inner_product(const SampledSignal& f, const SampledSignal& g);
double norm_sq(const SampledSignal& f);

/// M_b T_a g, i.e. t -> e^{2 pi i b t} g(t - a). Throws TruncationError when
/// the shift pushes more than 1e-10 of the energy off the grid.
SampledSignal translate_modulate(const SampledSignal& g, double a, double b);

/// sum_i coeffs[i] * signals[i].
SampledSignal linear_combination(std::span<const complex> coeffs,
                                 std::span<const SampledSignal> signals);

/// ghat(w) = int g(t) e^{-2 pi i w t} dt on the centered frequency grid with the
/// same node count and step 1/(count*step). Parseval holds exactly for the sums.
SampledSignal fourier_transform(const SampledSignal& g);

/// int |t|^alpha |f(t)|^2 dt.
double weighted_norm_sq(const SampledSignal& f, WeightExponent alpha);

/// Three columns: t,re,im.
void write_csv(std::ostream& out, const SampledSignal& f);

}  // namespace gabden

#endif  // GABDEN_SIGNAL_HPP
