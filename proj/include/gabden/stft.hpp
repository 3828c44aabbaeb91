#ifndef GABDEN_STFT_HPP
#define GABDEN_STFT_HPP

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gabden/phase.hpp"
#include "gabden/report.hpp"
#include "gabden/signal.hpp"

namespace gabden {

/// phi(t) = (2/pi)^{1/4} e^{-t^2}, unit L2 norm.
double window_value(double t);

/// The sampled window. Throws ResolutionError for step > 0.25.
SampledSignal window(const TimeGrid& grid);

/// V_phi g(x, y) = int g(t) conj(phi(t - x)) e^{-2 pi i y t} dt by a Riemann sum.
/// Throws TruncationError when the shifted window leaves the grid with more than
/// 1e-8 of its energy.
complex stft_point(const SampledSignal& g, PhasePoint p);

/// Closed form V_phi phi(x, y) = e^{-pi i x y - x^2/2 - pi^2 y^2/2}.
complex gaussian_ambiguity(PhasePoint p);

/// Closed form V_phi(M_mu T_lambda phi)(x, y).
complex gaussian_atom_stft(double lambda, double mu, PhasePoint p);

/// Samples of G = V_phi g on a phase grid, x-major.
class STFTField {
 public:
  STFTField() = default;
  STFTField(PhaseGrid grid, std::vector<complex> values, std::shared_ptr<const SampledSignal> source,
            std::string description);

  const PhaseGrid& grid() const { return grid_; }
  std::span<const complex> values() const { return values_; }
  complex at(std::size_t i, std::size_t j) const { return values_[i * grid_.ny() + j]; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  /// The transformed signal, when kept; lets callers evaluate G off the grid.
  const std::shared_ptr<const SampledSignal>& source() const { return source_; }
  const std::string& description() const { return description_; }

  /// Riemann sum of |G|^2 over the grid.
  double norm_sq() const;

  /// Columns x,y,re,im,modulus.
  void write_csv(std::ostream& out) const;
  /// Grid descriptor plus flat [re, im] pairs.
  Json to_json() const;

 private:
  PhaseGrid grid_;
  std::vector<complex> values_;
  std::shared_ptr<const SampledSignal> source_;
  std::string description_;
};

STFTField stft_field(const SampledSignal& g, const PhaseGrid& grid);

/// Compares |V_phi(M_mu T_lambda g)(x, y)| against |V_phi g(x - lambda, y - mu)| at every sample
/// point; passes when the largest discrepancy is <= 1e-5.
VerificationReport check_covariance(const SampledSignal& g, PhasePoint shift,
                                    std::span<const PhasePoint> sample_points);

struct WeightedFieldNorm {
  double value = 0.0;        // int int (|x|^a + |y|^a) |G|^2 over the whole grid
  double inner_value = 0.0;  // same over the box shrunk to 3/4 of its half-widths
  bool converged = true;     // relative gap between the two below 1e-2
};

WeightedFieldNorm weighted_field_norm_sq(const STFTField& field, WeightExponent alpha);

/// Right-hand side of the weighted-norm transfer estimate
///   C(a) (||g||^2 ||phi||_a^2 + ||phi||^2 ||g||_a^2) + the same with g, phi replaced by
///   their Fourier transforms, with C(a) = max(1, 2^{a-1}).
double weighted_transfer_bound(const SampledSignal& g, WeightExponent alpha);

/// |G|^2 masses over axis-aligned squares, treating each node as a cell and
/// weighting partially covered cells by their covered fraction.
class FieldMass {
 public:
  explicit FieldMass(const STFTField& field);

  double total() const { return total_; }
  double in_cube(const Cube& cube) const;
  double outside_cube(const Cube& cube) const { return total_ - in_cube(cube); }
  /// Largest |G|^2 on the outermost ring of nodes.
  double boundary_max() const { return boundary_max_; }
  /// Half-width of the largest origin-centred square the grid covers.
  double covered_half_side() const;

 private:
  double rect(std::size_t i0, std::size_t i1, std::size_t j0, std::size_t j1) const;

  Axis x_;
  Axis y_;
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::vector<double> prefix_;  // (nx+1) x (ny+1)
  double total_ = 0.0;
  double boundary_max_ = 0.0;
};

}  // namespace gabden

#endif  // GABDEN_STFT_HPP
