#ifndef GABDEN_THEOREMS_HPP
#define GABDEN_THEOREMS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gabden/frames.hpp"
#include "gabden/phase.hpp"
#include "gabden/pointset.hpp"
#include "gabden/report.hpp"
#include "gabden/signal.hpp"
#include "gabden/stft.hpp"

namespace gabden {

struct ErrorIntegral {
  double value = 0.0;
  /// False when the field box is smaller than 2R + 2 and the mass it may miss
  /// is not negligible.
  bool covered = true;
  /// Envelope of the contribution lost outside the field box.
  double tail_estimate = 0.0;
};

/// I_G(R) = int_{Q_0(R)} int_{Q_0^c(R+1/4)} |G(t - x, s - y)|^2 dt ds dx dy.
/// The outer integral is a midpoint rule with the field's step; the inner one is
/// ||G||^2 minus the mass of G on the square centred at (-x, -y) with half-side R + 1/4.
ErrorIntegral error_integral_detail(const STFTField& field, double R);
double error_integral(const STFTField& field, double R);

struct Err2Options {
  double field_half_side = 9.0;
  double field_step = 0.1;
};

/// Fits the smallest c with I_G(R) <= c ||V_phi g||^2_{L^2_a} rho_a(R) over the radii
/// and refits after adding twice the largest radius; passes when c is finite and
/// moves by at most 20%.
VerificationReport err2_bound_check(const SampledSignal& g, WeightExponent alpha, std::span<const double> radii,
                                    const Err2Options& options = {});

struct PointEstimate {
  double c_hat = 0.0;
  double delta = 0.0;
  std::size_t trials = 0;
  std::size_t skipped = 0;
  std::uint64_t seed = 0;
};

using PhaseFunction = std::function<complex(PhasePoint)>;

/// |G(p)|^2 / int_{Q_p(delta)} |G|^2 with a midpoint rule on the cube.
double point_ratio(const PhaseFunction& G, PhasePoint p, double delta);

/// Empirical C(delta): the largest point_ratio over random combinations of one to
/// four Gaussian atoms, evaluated through the closed-form STFT. Trial t draws from
/// its own stream seeded by (seed, t), so the population is fixed by the seed.
PointEstimate point_estimate_constant(double delta, int trials, std::uint64_t seed);

/// Both covering estimates at each sample point:
///   sum_{Lambda in Q} |G(x - l, y - m)|^2      <= c int_{Q(R + 1/4)} |G(x - s, y - t)|^2
///   sum_{Lambda outside Q} |G(x - l, y - m)|^2 <= c int_{Q^c(R - 1/4)} |G(x - s, y - t)|^2
/// The field must carry its source signal; G is evaluated off-grid from it.
VerificationReport covering_inequality_check(const PointSet& ps, const STFTField& field, const Cube& q, double c_delta,
                                             std::span<const PhasePoint> sample_points);

enum class Hypothesis { riesz_sequence, frame, uniformly_minimal, minimal, complete };

Hypothesis parse_hypothesis(const std::string& name);
std::string to_string(Hypothesis h);

struct QuadratureParams {
  double field_half_side = 9.0;  // STFT field box for I_G and b(eps)
  double field_step = 0.1;
  double section_half_side = 3.0;  // central section for Gram bounds
  double probe_step = 0.1;         // frame-sum probes
  int trials = 200;                // C(delta) estimation
  double kappa = 2.0;
  std::uint64_t seed = 1;
};

/// One verification case: generators, index set, radii and hypothesis.
struct CaseSpec {
  std::string name = "case";
  std::vector<Preset> generators;
  double time_extent = 12.0;
  double time_step = 0.01;
  std::variant<PointSet, Lattice2D, PointFamily> points;
  std::vector<double> radii;
  /// Cube centres range over this region for the extremal counts.
  std::optional<Cube> search_region;
  Hypothesis hypothesis = Hypothesis::riesz_sequence;
  /// Weight exponent for the rho_a route.
  std::optional<double> alpha;
  /// Supplied upper bound of the dual frame; estimated on the section otherwise.
  std::optional<double> dual_bound;
  QuadratureParams quad;

  TimeGrid time_grid() const;
  /// Explicit region, or one lattice cell / the point-set window.
  Cube region() const;
  /// Index sets, one per generator. Lattices are enumerated on a window wide
  /// enough for every cube centred in the region.
  std::vector<PointSet> members() const;
  std::vector<SampledSignal> realized_generators() const;
  Json describe() const;
};

/// Density inequalities on a case:
///   riesz_sequence: sup |Lambda cap Q(R)| <= (2R+1)^2 + C I_G(R + 1/4),   C = kappa C(delta) / A
///   frame:          inf |Lambda cap Q(R)| >= (2R-1)^2 - C I_G(R - 1/2),   C = kappa C(delta) B
/// summed over generators for families. With alpha set, I_G is also replaced by
/// its fitted envelope c ||V_phi g||^2_a rho_a. A comes from the central section; B is
/// 1 / min over probes of sum_lambda |V_phi g(x - l, y - m)|^2 unless supplied.
VerificationReport verify_density_theorem(const CaseSpec& spec);

/// (1 - B eps) |Lambda cap Q(R)| <= (2(R + b))^2 with b = b(eps) the smallest half-side
/// holding all but eps^2 of the mass of V_phi g, and B the largest dual norm on
/// the central section.
VerificationReport verify_uniform_minimality_density(const CaseSpec& spec, std::span<const double> epsilons);

/// Smallest half-side b on the field with mass outside Q_0(b) below eps^2, on a 0.01 ladder.
/// When the field keeps its source, the outside mass is ||g||^2 minus the mass inside Q_0(b).
std::optional<double> concentration_radius(const STFTField& field, double eps);

struct CommutationPhase {
  complex xi{1.0, 0.0};
  double residual = 0.0;
};

/// xi = e^{2 pi i a b} with M_a T_b g = xi T_b M_a g, and the relative residual.
CommutationPhase commutation_phase(double a, double b, const SampledSignal& g);

/// <g^{ml}, h^{nk}> over the index window [-w/2, w/2]^2 against the Kronecker
/// delta, plus ||h^{nk}|| = ||h||.
VerificationReport shifted_dual_biorthogonality(const Lattice2D& lattice, const SampledSignal& g,
                                                const SampledSignal& h, int index_window, double tolerance = 1e-6);

struct HapResult {
  std::optional<double> radius;  // empty: not found on the ladder
  double best_error = 0.0;       // worst probe error at the largest radius tried
  std::vector<double> ladder;
  std::vector<double> errors;  // worst probe error per rung
};

/// Radius ladder 0, 1/4, 1/2, 1, 2, 4.
std::vector<double> hap_ladder();

/// Smallest rung d with ||phi_xy - P_{W(x,y,d)} phi_xy||^2 <= eps at every probe,
/// W(x,y,d) spanned by the atoms indexed in Q_(x,y)(d).
HapResult hap_radius(const SampledSignal& g, const PointSet& ps, double epsilon,
                     std::span<const PhasePoint> probe_points);

}  // namespace gabden

#endif  // GABDEN_THEOREMS_HPP
