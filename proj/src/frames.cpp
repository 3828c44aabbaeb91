#include "gabden/frames.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include "gabden/errors.hpp"
#include "gabden/stft.hpp"

namespace gabden {

namespace {

constexpr double kRankTol = 1e-8;
constexpr double kIndefiniteTol = 1e-6;
constexpr double kInvertibleTol = 1e-8;

Eigen::MatrixXcd sample_matrix(std::span<const SampledSignal> signals) {
  const std::size_t n = signals.empty() ? 0 : signals.front().size();
  Eigen::MatrixXcd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(signals.size()));
  for (std::size_t j = 0; j < signals.size(); ++j) {
    const auto v = signals[j].values();
    for (std::size_t k = 0; k < n; ++k) a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = v[k];
  }
  return a;
}

GramSpectrum invertible_spectrum(const GaborSection& section, const char* what) {
  const GramSpectrum spectrum(gram_matrix(section));
  if (!(spectrum.lower() > kInvertibleTol)) {
    const double cond = spectrum.lower() > 0.0 ? spectrum.upper() / spectrum.lower()
                                               : std::numeric_limits<double>::infinity();
    throw ConditioningError(std::string(what) + ": Gram matrix is not numerically positive definite", cond);
  }
  return spectrum;
}

// Column n holds conj(V_phi f_n) at every node of the grid, i.e. <phi_xy, f_n>.
Eigen::MatrixXcd window_coefficients(const GaborSection& section, const PhaseGrid& grid) {
  const auto atoms = section.realized();
  Eigen::MatrixXcd b(static_cast<Eigen::Index>(atoms.size()), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t n = 0; n < atoms.size(); ++n) {
    const STFTField f = stft_field(atoms[n], grid);
    const auto v = f.values();
    for (std::size_t p = 0; p < v.size(); ++p) {
      b(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p)) = std::conj(v[p]);
    }
  }
  return b;
}

}  // namespace

GaborSection::GaborSection(std::vector<SampledSignal> generators, std::vector<GaborAtomRef> atoms)
    : generators_(std::move(generators)), atoms_(std::move(atoms)) {
  for (std::size_t i = 1; i < generators_.size(); ++i) {
    if (!(generators_[i].grid() == generators_[0].grid())) throw GridMismatchError();
  }
  std::set<std::tuple<std::size_t, double, double>> seen;
  realized_.reserve(atoms_.size());
  for (const auto& a : atoms_) {
    if (a.generator_index >= generators_.size()) {
      throw ConfigError("atom refers to generator " + std::to_string(a.generator_index) + " of " +
                        std::to_string(generators_.size()));
    }
    if (!seen.emplace(a.generator_index, a.lambda, a.mu).second) {
      std::ostringstream os;
      os << "repeated atom (" << a.generator_index << ", " << a.lambda << ", " << a.mu << ")";
      throw DomainError(os.str());
    }
    realized_.push_back(translate_modulate(generators_[a.generator_index], a.lambda, a.mu));
  }
}

GaborSection section_on_points(const SampledSignal& g, std::span<const PhasePoint> points) {
  std::vector<GaborAtomRef> atoms;
  atoms.reserve(points.size());
  for (const auto& p : points) atoms.push_back({0, p.x, p.y});
  return GaborSection({g}, std::move(atoms));
}

GaborSection section_on_family(std::span<const SampledSignal> generators, const PointFamily& family) {
  if (generators.size() != family.size()) {
    throw ConfigError("family has " + std::to_string(family.size()) + " members but " +
                      std::to_string(generators.size()) + " generators were given");
  }
  std::vector<GaborAtomRef> atoms;
  for (std::size_t n = 0; n < family.size(); ++n) {
    for (const auto& p : family.members()[n].points()) atoms.push_back({n, p.x, p.y});
  }
  return GaborSection(std::vector<SampledSignal>(generators.begin(), generators.end()), std::move(atoms));
}

GramMatrix::GramMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw ConfigError("Gram matrix must be square");
  if (entries_.size() == 0) return;
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InconsistencyError("Gram matrix is not Hermitian");
  }
}

GramMatrix gram_matrix(const GaborSection& section) {
  if (section.empty()) return GramMatrix(Eigen::MatrixXcd(0, 0));
  const Eigen::MatrixXcd a = sample_matrix(section.realized());
  Eigen::MatrixXcd g = a.adjoint() * a * section.realized().front().grid().step();
  g = 0.5 * (g + g.adjoint()).eval();
  return GramMatrix(std::move(g));
}

GramSpectrum::GramSpectrum(const GramMatrix& gram) {
  if (gram.size() == 0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram.entries());
  if (solver.info() != Eigen::Success) throw InconsistencyError("Gram eigen-decomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
  if (eigenvalues_(0) < -kIndefiniteTol) {
    std::ostringstream os;
    os << "Gram matrix is indefinite (smallest eigenvalue " << eigenvalues_(0) << ")";
    throw InconsistencyError(os.str());
  }
  const double cut = kRankTol * upper();
  for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
    if (eigenvalues_(i) >= cut && eigenvalues_(i) > 0.0) ++rank_;
  }
}

double GramSpectrum::lower() const { return eigenvalues_.size() == 0 ? 0.0 : std::max(0.0, eigenvalues_(0)); }

double GramSpectrum::upper() const {
  return eigenvalues_.size() == 0 ? 0.0 : std::max(0.0, eigenvalues_(eigenvalues_.size() - 1));
}

Eigen::MatrixXcd GramSpectrum::pseudo_inverse() const {
  const Eigen::Index n = eigenvalues_.size();
  const Eigen::Index r = static_cast<Eigen::Index>(rank_);
  const Eigen::MatrixXcd v = eigenvectors_.rightCols(r);
  const Eigen::VectorXd inv = eigenvalues_.tail(r).cwiseInverse();
  if (n == 0) return Eigen::MatrixXcd(0, 0);
  return v * inv.asDiagonal() * v.adjoint();
}

Eigen::VectorXd GramSpectrum::inverse_quadratic(const Eigen::MatrixXcd& columns) const {
  const Eigen::Index r = static_cast<Eigen::Index>(rank_);
  if (r == 0) return Eigen::VectorXd::Zero(columns.cols());
  const Eigen::MatrixXcd c = eigenvectors_.rightCols(r).adjoint() * columns;
  const Eigen::VectorXd inv = eigenvalues_.tail(r).cwiseInverse();
  return (inv.asDiagonal() * c.cwiseAbs2()).colwise().sum().transpose();
}

Json BoundsReport::to_json() const {
  Json out;
  out["kind"] = kind == BoundsKind::riesz_section ? "riesz_section" : "frame_section";
  out["lower"] = lower;
  out["upper"] = upper;
  if (singular) {
    out["conditioning"] = "inf";
  } else {
    out["conditioning"] = conditioning;
  }
  out["singular"] = singular;
  out["rank"] = rank;
  return out;
}

BoundsReport riesz_bounds(const GramMatrix& gram, BoundsKind kind) {
  const GramSpectrum spectrum(gram);
  BoundsReport out;
  out.kind = kind;
  out.lower = spectrum.lower();
  out.upper = spectrum.upper();
  out.rank = spectrum.rank();
  out.singular = !spectrum.full_rank();
  out.conditioning = out.singular ? std::numeric_limits<double>::infinity()
                     : out.lower > 0.0 ? out.upper / out.lower
                                       : 1.0;
  return out;
}

SampledSignal project(const GaborSection& section, const SampledSignal& f) {
  if (section.empty()) return SampledSignal::zero(f.grid());
  if (!(f.grid() == section.realized().front().grid())) throw GridMismatchError();
  const GramSpectrum spectrum = invertible_spectrum(section, "projection");
  const auto atoms = section.realized();
  Eigen::VectorXcd rhs(static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t i = 0; i < atoms.size(); ++i) rhs(static_cast<Eigen::Index>(i)) = inner_product(f, atoms[i]);
  const Eigen::VectorXcd c = spectrum.pseudo_inverse() * rhs;
  return linear_combination(std::span<const complex>(c.data(), static_cast<std::size_t>(c.size())), atoms);
}

std::vector<double> projection_energy(const GaborSection& section, const PhaseGrid& grid) {
  if (section.empty() || grid.empty()) return std::vector<double>(grid.size(), 0.0);
  const GramSpectrum spectrum(gram_matrix(section));
  const Eigen::VectorXd e = spectrum.inverse_quadratic(window_coefficients(section, grid));
  return {e.data(), e.data() + e.size()};
}

double projection_energy_at(const GaborSection& section, const GramSpectrum& spectrum, PhasePoint p) {
  const auto atoms = section.realized();
  if (atoms.empty()) return 0.0;
  Eigen::MatrixXcd b(static_cast<Eigen::Index>(atoms.size()), 1);
  for (std::size_t n = 0; n < atoms.size(); ++n) b(static_cast<Eigen::Index>(n), 0) = std::conj(stft_point(atoms[n], p));
  return spectrum.inverse_quadratic(b)(0);
}

VerificationReport trace_identity_check(const GaborSection& section, const Cube& quad_box, double quad_step) {
  if (!(quad_step > 0.0)) throw ConfigError("quadrature step must be positive");
  if (!(quad_box.half_side > 0.0)) throw ConfigError("quadrature box must have positive half-side");
  VerificationReport report("trace_identity");
  report.set_input("atoms", section.size());
  report.set_input("quad_box", {{"center", {quad_box.center.x, quad_box.center.y}}, {"half_side", quad_box.half_side}});
  report.set_input("quad_step", quad_step);

  const PhaseGrid grid = PhaseGrid::around(quad_box, quad_step);
  const std::size_t dim = section.empty() ? 0 : GramSpectrum(gram_matrix(section)).rank();
  const std::vector<double> energy = projection_energy(section, grid);
  double integral = 0.0;
  double edge = 0.0;
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    for (std::size_t j = 0; j < grid.ny(); ++j) {
      const double e = energy[i * grid.ny() + j];
      integral += e;
      if (i == 0 || j == 0 || i + 1 == grid.nx() || j + 1 == grid.ny()) edge = std::max(edge, e);
    }
  }
  integral *= grid.cell_area();

  report.add_measurement("integral", integral);
  report.add_measurement("dim_W", static_cast<double>(dim));
  report.add_measurement("boundary_max", edge);
  const double deviation = dim == 0 ? std::abs(integral) : std::abs(integral - static_cast<double>(dim)) / dim;
  report.add_check("relative_deviation", deviation, 0.02, Relation::at_most);
  if (edge > 1e-8) {
    // |P_W phi_xy|^2 decays at least like a Gaussian of unit width away from the box;
    // the strip just outside contributes about edge * perimeter * (1/2).
    const double tail = edge * 8.0 * quad_box.half_side * 0.5;
    std::ostringstream os;
    os << "quadrature box too small: integrand reaches " << edge << " on the boundary, tail mass estimate " << tail;
    report.warn(os.str());
  }
  return report;
}

std::vector<SampledSignal> dual_system(const GaborSection& section) {
  if (section.empty()) return {};
  const GramSpectrum spectrum = invertible_spectrum(section, "dual system");
  const Eigen::MatrixXcd inv = spectrum.pseudo_inverse();
  const auto atoms = section.realized();
  std::vector<SampledSignal> duals;
  duals.reserve(atoms.size());
  std::vector<complex> coeffs(atoms.size());
  for (std::size_t m = 0; m < atoms.size(); ++m) {
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      coeffs[k] = inv(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
    }
    duals.push_back(linear_combination(coeffs, atoms));
  }
  return duals;
}

VerificationReport biorthogonal_sum_field(const GaborSection& section, std::span<const SampledSignal> duals,
                                          const PhaseGrid& grid) {
  if (duals.size() != section.size()) {
    throw ConfigError("section has " + std::to_string(section.size()) + " atoms but " +
                      std::to_string(duals.size()) + " duals were given");
  }
  VerificationReport report("biorthogonal_sum");
  report.set_input("atoms", section.size());
  report.set_input("grid", {{"x", {grid.x.low, grid.x.high, grid.x.step}}, {"y", {grid.y.low, grid.y.high, grid.y.step}}});

  std::vector<complex> s(grid.size(), complex(0.0, 0.0));
  const auto atoms = section.realized();
  for (std::size_t n = 0; n < atoms.size(); ++n) {
    const STFTField f = stft_field(atoms[n], grid);
    const STFTField h = stft_field(duals[n], grid);
    for (std::size_t p = 0; p < s.size(); ++p) s[p] += f.values()[p] * std::conj(h.values()[p]);
  }
  const std::vector<double> proj = projection_energy(section, grid);

  double max_imag = 0.0;
  double min_real = s.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  double max_real = s.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
  double mismatch = 0.0;
  for (std::size_t p = 0; p < s.size(); ++p) {
    max_imag = std::max(max_imag, std::abs(s[p].imag()));
    min_real = std::min(min_real, s[p].real());
    max_real = std::max(max_real, s[p].real());
    mismatch = std::max(mismatch, std::abs(s[p] - proj[p]));
  }
  report.add_check("max_abs_imag", max_imag, 1e-6, Relation::at_most);
  report.add_check("min_real", min_real, -1e-6, Relation::at_least);
  report.add_check("max_real", max_real, 1.0 + 1e-6, Relation::at_most);
  report.add_check("max_projection_mismatch", mismatch, 1e-5, Relation::at_most);
  return report;
}

MinimalityMargin uniform_minimality_margin(const GramMatrix& gram) {
  MinimalityMargin out;
  if (gram.size() == 0) {
    out.margin = std::numeric_limits<double>::infinity();
    return out;
  }
  const GramSpectrum spectrum(gram);
  if (!spectrum.full_rank()) {
    out.failed = true;
    out.margin = 0.0;
    out.max_dual_norm = std::numeric_limits<double>::infinity();
    return out;
  }
  const Eigen::MatrixXcd inv = spectrum.pseudo_inverse();
  out.margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index n = 0; n < inv.rows(); ++n) {
    const double d = std::max(inv(n, n).real(), 0.0);
    const double norm = std::sqrt(d);
    out.dual_norms.push_back(norm);
    out.distances.push_back(1.0 / norm);
    out.margin = std::min(out.margin, 1.0 / norm);
    out.max_dual_norm = std::max(out.max_dual_norm, norm);
  }
  return out;
}

}  // namespace gabden
