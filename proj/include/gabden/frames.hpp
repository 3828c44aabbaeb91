#ifndef GABDEN_FRAMES_HPP
#define GABDEN_FRAMES_HPP

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gabden/phase.hpp"
#include "gabden/pointset.hpp"
#include "gabden/report.hpp"
#include "gabden/signal.hpp"

namespace gabden {

struct GaborAtomRef {
  std::size_t generator_index = 0;
  double lambda = 0.0;
  double mu = 0.0;
};

/// Finite Gabor section {M_mu T_lambda g_i} with every atom realized on the
/// generators' common time grid.
class GaborSection {
 public:
  GaborSection() = default;
  /// Throws ConfigError for a bad generator index, DomainError for a repeated
  /// atom and GridMismatchError when generators live on different grids.
  GaborSection(std::vector<SampledSignal> generators, std::vector<GaborAtomRef> atoms);

  std::span<const SampledSignal> generators() const { return generators_; }
  std::span<const GaborAtomRef> atoms() const { return atoms_; }
  std::span<const SampledSignal> realized() const { return realized_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

 private:
  std::vector<SampledSignal> generators_;
  std::vector<GaborAtomRef> atoms_;
  std::vector<SampledSignal> realized_;
};

GaborSection section_on_points(const SampledSignal& g, std::span<const PhasePoint> points);
/// Member n of the family is paired with generators[n].
GaborSection section_on_family(std::span<const SampledSignal> generators, const PointFamily& family);

/// Entry (i, j) = <f_j, f_i>, so ||sum a_n f_n||^2 = a^* G a.
class GramMatrix {
 public:
  explicit GramMatrix(Eigen::MatrixXcd entries);
  const Eigen::MatrixXcd& entries() const { return entries_; }
  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }

 private:
  Eigen::MatrixXcd entries_;
};

GramMatrix gram_matrix(const GaborSection& section);

/// Eigen-decomposition of a Gram matrix. Eigenvalues below 1e-8 * B count as
/// rank deficiency; inverses act on the numerical range only.
class GramSpectrum {
 public:
  /// Throws InconsistencyError when the smallest eigenvalue is below -1e-6.
  explicit GramSpectrum(const GramMatrix& gram);

  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXcd& eigenvectors() const { return eigenvectors_; }
  double lower() const;
  double upper() const;
  std::size_t rank() const { return rank_; }
  bool full_rank() const { return rank_ == static_cast<std::size_t>(eigenvalues_.size()); }
  Eigen::MatrixXcd pseudo_inverse() const;
  /// b^* G^+ b for each column b.
  Eigen::VectorXd inverse_quadratic(const Eigen::MatrixXcd& columns) const;

 private:
  Eigen::VectorXd eigenvalues_;  // ascending
  Eigen::MatrixXcd eigenvectors_;
  std::size_t rank_ = 0;
};

enum class BoundsKind { riesz_section, frame_section };

struct BoundsReport {
  double lower = 0.0;
  double upper = 0.0;
  BoundsKind kind = BoundsKind::riesz_section;
  double conditioning = 0.0;  // B/A, +inf when singular
  bool singular = false;
  std::size_t rank = 0;

  Json to_json() const;
};

/// Extreme Gram eigenvalues. On a finite section the Riesz bounds of the atoms
/// and the frame bounds of the atoms within their span coincide.
BoundsReport riesz_bounds(const GramMatrix& gram, BoundsKind kind = BoundsKind::riesz_section);

/// Orthogonal projection onto the span of the section. Throws ConditioningError
/// unless the smallest Gram eigenvalue exceeds 1e-8.
SampledSignal project(const GaborSection& section, const SampledSignal& f);

/// ||P_W phi_xy||^2 at every grid node, from the atoms' STFT fields and the
/// Gram pseudo-inverse.
std::vector<double> projection_energy(const GaborSection& section, const PhaseGrid& grid);

/// ||P_W phi_xy||^2 at a single point.
double projection_energy_at(const GaborSection& section, const GramSpectrum& spectrum, PhasePoint p);

/// Quadrature of int int ||P_W phi_xy||^2 over the box against dim W (numerical
/// rank). Passes at relative deviation <= 2%.
VerificationReport trace_identity_check(const GaborSection& section, const Cube& quad_box, double quad_step);

/// Biorthogonal system h_m = sum_k (G^{-1})_{km} f_k, so <f_n, h_m> = delta_nm.
/// Same conditioning requirement as project().
std::vector<SampledSignal> dual_system(const GaborSection& section);

/// S(x, y) = sum_n V f_n conj(V h_n) against ||P_W phi_xy||^2 on the grid.
VerificationReport biorthogonal_sum_field(const GaborSection& section, std::span<const SampledSignal> duals,
                                          const PhaseGrid& grid);

struct MinimalityMargin {
  double margin = 0.0;         // min_n dist(f_n, span{f_k : k != n})
  double max_dual_norm = 0.0;  // max_n ||h_n||
  std::vector<double> distances;
  std::vector<double> dual_norms;
  bool failed = false;  // singular Gram: some f_n lies in the span of the others
};

/// dist_n = 1 / sqrt((G^{-1})_nn) and ||h_n|| = sqrt((G^{-1})_nn).
MinimalityMargin uniform_minimality_margin(const GramMatrix& gram);

}  // namespace gabden

#endif  // GABDEN_FRAMES_HPP
