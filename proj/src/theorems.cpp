#include "gabden/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "gabden/errors.hpp"
#include "gabden/parallel.hpp"

namespace gabden {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string at_radius(const std::string& what, double R) {
  std::ostringstream os;
  os << what << "[R=" << R << "]";
  return os.str();
}

std::string at_eps(const std::string& what, double eps, double R) {
  std::ostringstream os;
  os << what << "[eps=" << eps << ",R=" << R << "]";
  return os.str();
}

Json cube_json(const Cube& q) { return {{"center", {q.center.x, q.center.y}}, {"half_side", q.half_side}}; }

ErrorIntegral error_integral_on(const FieldMass& mass, double step, double R) {
  ErrorIntegral out;
  if (!(R > 0.0) || mass.total() <= 0.0) return out;
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(2.0 * R / step - 1e-9)));
  const double h = 2.0 * R / static_cast<double>(n);
  const double total = mass.total();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -R + (static_cast<double>(i) + 0.5) * h;
    for (std::size_t j = 0; j < n; ++j) {
      const double y = -R + (static_cast<double>(j) + 0.5) * h;
      acc += std::max(0.0, total - mass.in_cube(Cube{{-x, -y}, R + 0.25}));
    }
  }
  out.value = acc * h * h;

  const double H = mass.covered_half_side();
  if (H < 2.0 * R + 2.0) {
    // Mass beyond the box, bounded by the boundary level spread over a unit-scale strip.
    const double missing = mass.boundary_max() * 8.0 * H * 0.5;
    out.tail_estimate = 4.0 * R * R * missing;
    out.covered = out.tail_estimate <= 1e-12;
  }
  return out;
}

bool has_duplicates(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return true;
  }
  return false;
}

GaborSection central_section(const std::vector<SampledSignal>& gens, const std::vector<PointSet>& members,
                             const Cube& cube) {
  std::vector<GaborAtomRef> atoms;
  for (std::size_t n = 0; n < members.size(); ++n) {
    for (const auto& p : members[n].points()) {
      if (cube.contains(p)) atoms.push_back({n, p.x, p.y});
    }
  }
  return GaborSection(gens, std::move(atoms));
}

// Generators indexed by family member.
std::vector<SampledSignal> member_generators(const std::vector<SampledSignal>& gens, std::size_t members) {
  if (gens.size() == members) return gens;
  return std::vector<SampledSignal>(members, gens.front());
}

DensityReport counts_for(const std::vector<PointSet>& members, std::span<const double> radii, const Cube& region) {
  if (members.size() == 1) return density_profile(members.front(), radii, region);
  return density_profile(PointFamily(members), radii, region);
}

double min_separation(const std::vector<PointSet>& members) {
  double sep = kInf;
  for (const auto& m : members) sep = std::min(sep, separation_constant(m));
  return sep;
}

}  // namespace

ErrorIntegral error_integral_detail(const STFTField& field, double R) {
  if (field.empty()) return {};
  const FieldMass mass(field);
  return error_integral_on(mass, std::min(field.grid().x.step, field.grid().y.step), R);
}

double error_integral(const STFTField& field, double R) { return error_integral_detail(field, R).value; }

VerificationReport err2_bound_check(const SampledSignal& g, WeightExponent alpha, std::span<const double> radii,
                                    const Err2Options& options) {
  std::vector<double> rs(radii.begin(), radii.end());
  if (rs.empty() || has_duplicates(rs) || !(rs.front() > 1.0)) {
    throw ConfigError("err2 check needs strictly increasing radii greater than 1");
  }
  VerificationReport report("err2_bound");
  report.set_input("signal", g.analytic() ? g.analytic()->preset.describe() : "sampled");
  report.set_input("alpha", alpha.value());
  report.set_input("radii", rs);
  report.set_input("field_half_side", options.field_half_side);
  report.set_input("field_step", options.field_step);

  const STFTField field = stft_field(g, PhaseGrid::square(options.field_half_side, options.field_step));
  const WeightedFieldNorm wn = weighted_field_norm_sq(field, alpha);
  report.add_constant("weighted_norm_sq", wn.value);
  if (!wn.converged) {
    std::ostringstream os;
    os << "weighted norm of V_phi g does not converge on the field box (whole " << wn.value << ", inner "
       << wn.inner_value << ")";
    report.fail_hypothesis(os.str());
    return report;
  }

  const FieldMass mass(field);
  auto fit = [&](double R) {
    const ErrorIntegral ei = error_integral_on(mass, options.field_step, R);
    report.add_measurement(at_radius("I_G", R), ei.value);
    if (!ei.covered) {
      std::ostringstream os;
      os << "field box misses part of I_G at R = " << R << " (tail estimate " << ei.tail_estimate << ")";
      report.warn(os.str());
    }
    const double denom = wn.value * rho_alpha(R, alpha);
    const double c = denom > 0.0 ? ei.value / denom : (ei.value > 0.0 ? kInf : 0.0);
    report.add_measurement(at_radius("ratio", R), c);
    return c;
  };
  double c = 0.0;
  for (double R : rs) c = std::max(c, fit(R));
  const double c_ext = std::max(c, fit(2.0 * rs.back()));
  report.add_constant("c", c);
  report.add_constant("c_extended", c_ext);
  const double drift = c > 0.0 ? (c_ext - c) / c : (c_ext > 0.0 ? kInf : 0.0);
  report.add_check("constant_drift", drift, 0.2, Relation::at_most);
  return report;
}

double point_ratio(const PhaseFunction& G, PhasePoint p, double delta) {
  const auto n = static_cast<std::size_t>(std::clamp(std::ceil(2.0 * delta / 0.05), 16.0, 80.0));
  const double h = 2.0 * delta / static_cast<double>(n);
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = p.x - delta + (static_cast<double>(i) + 0.5) * h;
    for (std::size_t j = 0; j < n; ++j) {
      const double t = p.y - delta + (static_cast<double>(j) + 0.5) * h;
      mass += std::norm(G({s, t}));
    }
  }
  mass *= h * h;
  const double top = std::norm(G(p));
  if (!(mass > 1e-300)) return top > 0.0 ? kInf : std::numeric_limits<double>::quiet_NaN();
  return top / mass;
}

PointEstimate point_estimate_constant(double delta, int trials, std::uint64_t seed) {
  if (!(delta > 0.0)) throw ConfigError("point estimate needs delta > 0");
  if (trials < 100) throw ConfigError("point estimate needs at least 100 trials");
  std::vector<double> ratios(static_cast<std::size_t>(trials));
  parallel_for(ratios.size(), [&](std::size_t t) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<int> count(1, 4);
    std::uniform_real_distribution<double> place(-1.5, 1.5);
    std::uniform_real_distribution<double> probe(-2.0, 2.0);
    std::normal_distribution<double> gauss;
    struct Atom {
      double lambda, mu;
      complex c;
    };
    std::vector<Atom> atoms(static_cast<std::size_t>(count(rng)));
    for (auto& a : atoms) {
      a.lambda = place(rng);
      a.mu = place(rng);
      const double re = gauss(rng);
      a.c = complex(re, gauss(rng));
    }
    const PhasePoint p{probe(rng), probe(rng)};
    const PhaseFunction G = [&atoms](PhasePoint q) {
      complex acc{0.0, 0.0};
      for (const auto& a : atoms) acc += a.c * gaussian_atom_stft(a.lambda, a.mu, q);
      return acc;
    };
    ratios[t] = point_ratio(G, p, delta);
  });
  PointEstimate out;
  out.delta = delta;
  out.seed = seed;
  out.trials = ratios.size();
  for (double r : ratios) {
    if (!std::isfinite(r)) {
      ++out.skipped;
      continue;
    }
    out.c_hat = std::max(out.c_hat, r);
  }
  return out;
}

VerificationReport covering_inequality_check(const PointSet& ps, const STFTField& field, const Cube& q,
                                             double c_delta, std::span<const PhasePoint> sample_points) {
  if (!field.source()) throw ConfigError("covering check needs a field that keeps its source signal");
  VerificationReport report("covering_inequality");
  report.set_input("points", ps.size());
  report.set_input("cube", cube_json(q));
  report.set_input("c_delta", c_delta);
  report.set_input("sample_points", sample_points.size());
  report.set_input("field", field.description());

  const double sep = separation_constant(ps);
  const double natural = sep / (2.0 * std::sqrt(2.0));
  report.add_measurement("separation", sep);
  report.add_measurement("delta_eff", std::min(natural, 0.25));
  if (sep > 0.5) {
    std::ostringstream os;
    os << "separation " << sep << " exceeds 1/2: disjoint cubes around the points are capped at the 1/4 margin";
    report.warn(os.str());
  }

  const FieldMass mass(field);
  const double reach = mass.covered_half_side();
  const SampledSignal& g = *field.source();
  auto G = [&](double x, double y) -> complex {
    if (std::abs(x) > reach || std::abs(y) > reach) return {0.0, 0.0};
    return stft_point(g, {x, y});
  };

  double worst_in = 0.0;
  double worst_out = 0.0;
  for (const auto& s : sample_points) {
    double in = 0.0;
    double out = 0.0;
    for (const auto& p : ps.points()) {
      const double e = std::norm(G(s.x - p.x, s.y - p.y));
      (q.contains(p) ? in : out) += e;
    }
    const PhasePoint c{s.x - q.center.x, s.y - q.center.y};
    const double rhs_in = mass.in_cube(Cube{c, q.half_side + 0.25});
    const double inner = q.half_side - 0.25;
    const double rhs_out = mass.total() - (inner > 0.0 ? mass.in_cube(Cube{c, inner}) : 0.0);
    auto ratio = [](double lhs, double rhs) {
      if (lhs <= 0.0) return 0.0;
      return rhs > 1e-300 ? lhs / rhs : kInf;
    };
    worst_in = std::max(worst_in, ratio(in, rhs_in));
    worst_out = std::max(worst_out, ratio(out, rhs_out));
  }
  report.add_check("inner_ratio", worst_in, c_delta, Relation::at_most);
  report.add_check("outer_ratio", worst_out, c_delta, Relation::at_most);
  return report;
}

Hypothesis parse_hypothesis(const std::string& name) {
  if (name == "riesz_sequence") return Hypothesis::riesz_sequence;
  if (name == "frame") return Hypothesis::frame;
  if (name == "uniformly_minimal") return Hypothesis::uniformly_minimal;
  if (name == "minimal") return Hypothesis::minimal;
  if (name == "complete") return Hypothesis::complete;
  throw ConfigError("unknown hypothesis '" + name + "'");
}

std::string to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::riesz_sequence:
      return "riesz_sequence";
    case Hypothesis::frame:
      return "frame";
    case Hypothesis::uniformly_minimal:
      return "uniformly_minimal";
    case Hypothesis::minimal:
      return "minimal";
    case Hypothesis::complete:
      return "complete";
  }
  return "unknown";
}

TimeGrid CaseSpec::time_grid() const { return TimeGrid::midpoint(time_extent, time_step); }

Cube CaseSpec::region() const {
  if (search_region) return *search_region;
  if (const auto* lat = std::get_if<Lattice2D>(&points)) {
    return Cube{{0.0, 0.0}, std::hypot(lat->v.x, lat->v.y) + std::hypot(lat->w.x, lat->w.y)};
  }
  if (const auto* ps = std::get_if<PointSet>(&points)) return ps->window();
  return std::get<PointFamily>(points).window();
}

std::vector<PointSet> CaseSpec::members() const {
  if (const auto* ps = std::get_if<PointSet>(&points)) return {*ps};
  if (const auto* lat = std::get_if<Lattice2D>(&points)) {
    const Cube r = region();
    const double max_r = radii.empty() ? 0.0 : *std::max_element(radii.begin(), radii.end());
    const double half = std::max(r.half_side + max_r, quad.section_half_side) + 1.0;
    return {lattice_points(*lat, Cube{r.center, half})};
  }
  const auto& fam = std::get<PointFamily>(points);
  return {fam.members().begin(), fam.members().end()};
}

std::vector<SampledSignal> CaseSpec::realized_generators() const {
  if (generators.empty()) throw ConfigError("case '" + name + "' has no generators");
  const std::size_t want = std::holds_alternative<PointFamily>(points) ? std::get<PointFamily>(points).size() : 1;
  if (generators.size() != 1 && generators.size() != want) {
    throw ConfigError("case '" + name + "' has " + std::to_string(generators.size()) + " generators for " +
                      std::to_string(want) + " index sets");
  }
  const TimeGrid grid = time_grid();
  std::vector<SampledSignal> out;
  for (const auto& p : generators) out.push_back(make_preset(p, grid));
  return member_generators(out, want);
}

Json CaseSpec::describe() const {
  Json out;
  out["name"] = name;
  Json gens = Json::array();
  for (const auto& g : generators) gens.push_back(g.describe());
  out["generators"] = gens;
  out["time_grid"] = {{"extent", time_extent}, {"step", time_step}};
  if (const auto* ps = std::get_if<PointSet>(&points)) {
    Json d{{"kind", "point_set"}, {"count", ps->size()}};
    if (ps->declared_separation()) d["declared_separation"] = *ps->declared_separation();
    d["window"] = cube_json(ps->window());
    out["points"] = d;
  } else if (const auto* lat = std::get_if<Lattice2D>(&points)) {
    out["points"] = {{"kind", "lattice"}, {"v", {lat->v.x, lat->v.y}}, {"w", {lat->w.x, lat->w.y}}};
  } else {
    const auto& fam = std::get<PointFamily>(points);
    Json sizes = Json::array();
    for (const auto& m : fam.members()) sizes.push_back(m.size());
    out["points"] = {{"kind", "family"}, {"member_sizes", sizes}, {"window", cube_json(fam.window())}};
  }
  out["radii"] = radii;
  out["search_region"] = cube_json(region());
  out["hypothesis"] = to_string(hypothesis);
  if (alpha) out["alpha"] = *alpha;
  if (dual_bound) out["dual_bound"] = *dual_bound;
  out["quadrature"] = {{"field_half_side", quad.field_half_side}, {"field_step", quad.field_step},
                       {"section_half_side", quad.section_half_side}, {"probe_step", quad.probe_step},
                       {"trials", quad.trials}, {"kappa", quad.kappa}, {"seed", quad.seed}};
  return out;
}

VerificationReport verify_density_theorem(const CaseSpec& spec) {
  const bool riesz = spec.hypothesis == Hypothesis::riesz_sequence;
  if (!riesz && spec.hypothesis != Hypothesis::frame) {
    throw ConfigError("density theorem needs hypothesis riesz_sequence or frame, got " + to_string(spec.hypothesis));
  }
  if (spec.radii.empty()) throw ConfigError("case '" + spec.name + "' has no radii");
  VerificationReport report("density_theorem");
  report.set_input("case", spec.describe());

  const std::vector<SampledSignal> gens = spec.realized_generators();
  const std::vector<PointSet> members = spec.members();
  const Cube region = spec.region();
  const auto& q = spec.quad;

  const double sep = min_separation(members);
  const double delta_eff = std::min(sep / (2.0 * std::sqrt(2.0)), 0.25);
  report.add_constant("separation", sep);
  report.add_constant("delta_eff", delta_eff);

  const GaborSection section = central_section(gens, members, Cube{region.center, q.section_half_side});
  report.add_constant("section_atoms", static_cast<double>(section.size()));
  if (section.empty()) {
    report.fail_hypothesis("the central section holds no atoms");
    return report;
  }
  const GramMatrix gram = gram_matrix(section);
  const BoundsReport bounds = riesz_bounds(gram, riesz ? BoundsKind::riesz_section : BoundsKind::frame_section);
  report.add_constant("section_lower", bounds.lower);
  report.add_constant("section_upper", bounds.upper);

  double factor = 0.0;
  if (riesz) {
    if (bounds.singular || bounds.lower < 1e-6) {
      std::ostringstream os;
      os << "section Gram is nearly singular (A = " << bounds.lower << ", rank " << bounds.rank << " of "
         << section.size() << "): no Riesz-sequence evidence";
      report.fail_hypothesis(os.str());
      return report;
    }
    report.add_constant("A", bounds.lower);
    factor = 1.0 / bounds.lower;
  } else {
    double B = 0.0;
    if (spec.dual_bound) {
      B = *spec.dual_bound;
    } else {
      const double half = std::min(1.0, 0.5 * q.section_half_side);
      const PhaseGrid probes = PhaseGrid::around(Cube{region.center, half}, q.probe_step);
      std::vector<double> frame_sum(probes.size(), 0.0);
      for (const auto& atom : section.realized()) {
        const STFTField f = stft_field(atom, probes);
        for (std::size_t p = 0; p < frame_sum.size(); ++p) frame_sum[p] += std::norm(f.values()[p]);
      }
      const double lower = *std::min_element(frame_sum.begin(), frame_sum.end());
      report.add_constant("probe_frame_lower", lower);
      if (!(lower > 1e-6)) {
        std::ostringstream os;
        os << "frame sum at the probes drops to " << lower << ": no frame evidence on the section";
        report.fail_hypothesis(os.str());
        return report;
      }
      B = 1.0 / lower;
    }
    report.add_constant("B", B);
    factor = B;
  }

  const PointEstimate pe = point_estimate_constant(delta_eff, q.trials, q.seed);
  report.add_constant("C_hat", pe.c_hat);
  report.add_constant("kappa", q.kappa);
  report.add_constant("trials", static_cast<double>(pe.trials));
  report.add_constant("skipped_trials", static_cast<double>(pe.skipped));
  const double C = q.kappa * pe.c_hat * factor;
  report.add_constant("C", C);

  std::vector<FieldMass> masses;
  std::vector<double> weighted;
  bool rho_route = spec.alpha.has_value();
  const PhaseGrid fgrid = PhaseGrid::square(q.field_half_side, q.field_step);
  for (const auto& g : gens) {
    const STFTField field = stft_field(g, fgrid);
    masses.emplace_back(field);
    if (spec.alpha) {
      const WeightedFieldNorm wn = weighted_field_norm_sq(field, WeightExponent(*spec.alpha));
      weighted.push_back(wn.value);
      if (!wn.converged) {
        report.warn("weighted norm of V_phi g does not converge on the field box; rho route skipped");
        rho_route = false;
      }
    }
  }
  auto I_sum = [&](double r) {
    double acc = 0.0;
    for (const auto& m : masses) {
      const ErrorIntegral ei = error_integral_on(m, q.field_step, r);
      if (!ei.covered) {
        std::ostringstream os;
        os << "field box misses part of I_G at R = " << r << " (tail estimate " << ei.tail_estimate << ")";
        report.warn(os.str());
      }
      acc += ei.value;
    }
    return acc;
  };

  const DensityReport counts = counts_for(members, spec.radii, region);
  const double shift = riesz ? 0.25 : -0.5;
  std::vector<double> I(spec.radii.size());
  for (std::size_t i = 0; i < spec.radii.size(); ++i) {
    const double R = spec.radii[i];
    I[i] = I_sum(R + shift);
    report.add_measurement(at_radius(riesz ? "sup_count" : "inf_count", R),
                           static_cast<double>(riesz ? counts.max_counts[i] : counts.min_counts[i]));
    report.add_measurement(at_radius(riesz ? "normalized_sup" : "normalized_inf", R),
                           riesz ? counts.normalized_max[i] : counts.normalized_min[i]);
    report.add_measurement(at_radius("I_G", R + shift), I[i]);
    if (counts.truncated[i]) report.warn(at_radius("cubes leave the point-set window", R));
    if (riesz) {
      const double lead = (2.0 * R + 1.0) * (2.0 * R + 1.0);
      report.add_check(at_radius("part1", R), static_cast<double>(counts.max_counts[i]), lead + C * I[i],
                       Relation::at_most);
    } else {
      const double lead = (2.0 * R - 1.0) * (2.0 * R - 1.0);
      report.add_check(at_radius("part2", R), static_cast<double>(counts.min_counts[i]), lead - C * I[i],
                       Relation::at_least);
    }
  }

  if (rho_route) {
    const WeightExponent alpha(*spec.alpha);
    double c_fit = 0.0;
    for (std::size_t n = 0; n < masses.size(); ++n) {
      for (double R : spec.radii) {
        const double r = R + shift;
        if (!(r > 1.0) || !(weighted[n] > 0.0)) continue;
        const double In = error_integral_on(masses[n], q.field_step, r).value;
        c_fit = std::max(c_fit, In / (weighted[n] * rho_alpha(r, alpha)));
      }
    }
    double wsum = 0.0;
    for (double w : weighted) wsum += w;
    report.add_constant("rho_fit_c", c_fit);
    report.add_constant("weighted_norm_sq", wsum);
    for (std::size_t i = 0; i < spec.radii.size(); ++i) {
      const double R = spec.radii[i];
      const double r = R + shift;
      if (!(r > 1.0)) {
        report.warn(at_radius("rho route skipped (needs R > 1)", r));
        continue;
      }
      const double envelope = C * c_fit * wsum * rho_alpha(r, alpha);
      if (riesz) {
        report.add_check(at_radius("rho_part1", R), static_cast<double>(counts.max_counts[i]),
                         (2.0 * R + 1.0) * (2.0 * R + 1.0) + envelope, Relation::at_most);
      } else {
        report.add_check(at_radius("rho_part2", R), static_cast<double>(counts.min_counts[i]),
                         (2.0 * R - 1.0) * (2.0 * R - 1.0) - envelope, Relation::at_least);
      }
    }
  }
  return report;
}

std::optional<double> concentration_radius(const STFTField& field, double eps) {
  if (!(eps > 0.0)) throw ConfigError("concentration radius needs eps > 0");
  const FieldMass mass(field);
  const double target = eps * eps;
  const double H = mass.covered_half_side();
  // With the source at hand, mass beyond the grid counts as outside too.
  const double total = field.source() ? std::max(mass.total(), norm_sq(*field.source())) : mass.total();
  for (int k = 0; 0.01 * k <= H + 1e-12; ++k) {
    const double b = 0.01 * k;
    if (total - mass.in_cube(Cube{{0.0, 0.0}, b}) < target) return b;
  }
  return std::nullopt;
}

VerificationReport verify_uniform_minimality_density(const CaseSpec& spec, std::span<const double> epsilons) {
  if (spec.hypothesis != Hypothesis::uniformly_minimal) {
    throw ConfigError("uniform minimality check needs hypothesis uniformly_minimal, got " +
                      to_string(spec.hypothesis));
  }
  if (spec.radii.empty()) throw ConfigError("case '" + spec.name + "' has no radii");
  if (epsilons.empty()) throw ConfigError("uniform minimality check needs at least one epsilon");
  VerificationReport report("uniform_minimality_density");
  report.set_input("case", spec.describe());
  report.set_input("epsilons", std::vector<double>(epsilons.begin(), epsilons.end()));

  const std::vector<SampledSignal> gens = spec.realized_generators();
  const std::vector<PointSet> members = spec.members();
  const Cube region = spec.region();
  const auto& q = spec.quad;

  const GaborSection section = central_section(gens, members, Cube{region.center, q.section_half_side});
  report.add_constant("section_atoms", static_cast<double>(section.size()));
  if (section.empty()) {
    report.fail_hypothesis("the central section holds no atoms");
    return report;
  }
  const MinimalityMargin mm = uniform_minimality_margin(gram_matrix(section));
  if (mm.failed) {
    report.fail_hypothesis("section Gram is singular: some atom lies in the span of the others");
    return report;
  }
  const double B = mm.max_dual_norm;
  report.add_constant("margin", mm.margin);
  report.add_constant("B", B);
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(1.0 - B * eps > 0.0)) {
      std::ostringstream os;
      os << "epsilon " << eps << " is too large for the section's dual bound B = " << B << " (1 - B eps <= 0)";
      throw ConfigError(os.str());
    }
  }

  std::vector<STFTField> fields;
  for (const auto& g : gens) fields.push_back(stft_field(g, PhaseGrid::square(q.field_half_side, q.field_step)));
  const DensityReport counts = counts_for(members, spec.radii, region);

  for (double eps : epsilons) {
    double b = 0.0;
    for (const auto& f : fields) {
      const auto r = concentration_radius(f, eps);
      if (!r) {
        std::ostringstream os;
        os << "the field box cannot hold all but eps^2 = " << eps * eps << " of the STFT mass";
        throw TruncationError(os.str());
      }
      b = std::max(b, *r);
    }
    std::ostringstream tag;
    tag << "b[eps=" << eps << "]";
    report.add_constant(tag.str(), b);
    const double shrink = 1.0 - B * eps;
    double prev = kInf;
    double worst_rise = -kInf;
    for (std::size_t i = 0; i < spec.radii.size(); ++i) {
      const double R = spec.radii[i];
      const double count = static_cast<double>(counts.max_counts[i]);
      const double side = 2.0 * (R + b);
      report.add_check(at_eps("count", eps, R), shrink * count, side * side, Relation::at_most);
      const double ceiling = side * side / (shrink * 4.0 * R * R);
      report.add_measurement(at_eps("ceiling", eps, R), ceiling);
      report.add_measurement(at_eps("normalized_sup", eps, R), counts.normalized_max[i]);
      if (counts.truncated[i]) report.warn(at_radius("cubes leave the point-set window", R));
      if (i > 0) worst_rise = std::max(worst_rise, ceiling - prev);
      prev = ceiling;
    }
    if (spec.radii.size() > 1) {
      std::ostringstream name;
      name << "ceiling_rise[eps=" << eps << "]";
      report.add_check(name.str(), worst_rise, 0.0, Relation::at_most, 1e-12);
    }
  }
  return report;
}

CommutationPhase commutation_phase(double a, double b, const SampledSignal& g) {
  CommutationPhase out;
  out.xi = std::polar(1.0, kTwoPi * a * b);
  const SampledSignal lhs = translate_modulate(g, b, a);
  const SampledSignal rhs = translate_modulate(translate_modulate(g, 0.0, a), b, 0.0);
  const auto l = lhs.values();
  const auto r = rhs.values();
  double diff = 0.0;
  for (std::size_t k = 0; k < l.size(); ++k) diff += std::norm(l[k] - out.xi * r[k]);
  const double base = norm_sq(g);
  out.residual = base > 0.0 ? std::sqrt(diff * g.grid().step() / base) : 0.0;
  return out;
}

VerificationReport shifted_dual_biorthogonality(const Lattice2D& lattice, const SampledSignal& g,
                                                const SampledSignal& h, int index_window, double tolerance) {
  if (index_window < 1) throw ConfigError("index window must be at least 1");
  if (!(g.grid() == h.grid())) throw GridMismatchError();
  VerificationReport report("shifted_dual_biorthogonality");
  report.set_input("lattice", {{"v", {lattice.v.x, lattice.v.y}}, {"w", {lattice.w.x, lattice.w.y}}});
  report.set_input("index_window", index_window);
  report.set_input("tolerance", tolerance);

  const int half = index_window / 2;
  std::vector<SampledSignal> gs;
  std::vector<SampledSignal> hs;
  for (int n = -half; n <= half; ++n) {
    for (int k = -half; k <= half; ++k) {
      const PhasePoint p = lattice.at(n, k);
      gs.push_back(translate_modulate(g, p.x, p.y));
      hs.push_back(translate_modulate(h, p.x, p.y));
    }
  }
  const std::size_t centre = gs.size() / 2;

  double pre_diag = std::abs(inner_product(g, h) - 1.0);
  double pre_off = 0.0;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    if (i != centre) pre_off = std::max(pre_off, std::abs(inner_product(gs[i], h)));
  }
  report.add_measurement("precondition_diagonal", pre_diag);
  report.add_measurement("precondition_off_diagonal", pre_off);
  if (pre_diag > 1e-6 || pre_off > 1e-6) {
    std::ostringstream os;
    os << "h is not biorthogonal to the shifts of g (|<g,h> - 1| = " << pre_diag << ", max |<g^nk,h>| = " << pre_off
       << ")";
    report.fail_hypothesis(os.str());
    return report;
  }

  std::vector<double> rows(gs.size(), 0.0);
  std::vector<double> diag(gs.size(), 0.0);
  parallel_for(gs.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < hs.size(); ++j) {
      const complex v = inner_product(gs[i], hs[j]);
      if (i == j) {
        diag[i] = std::abs(v - 1.0);
      } else {
        rows[i] = std::max(rows[i], std::abs(v));
      }
    }
  });
  const double h_norm = std::sqrt(norm_sq(h));
  double norm_dev = 0.0;
  for (const auto& s : hs) norm_dev = std::max(norm_dev, std::abs(std::sqrt(norm_sq(s)) / h_norm - 1.0));

  report.add_check("max_diagonal_deviation", *std::max_element(diag.begin(), diag.end()), tolerance,
                   Relation::at_most);
  report.add_check("max_off_diagonal", *std::max_element(rows.begin(), rows.end()), tolerance, Relation::at_most);
  report.add_check("max_norm_ratio_deviation", norm_dev, tolerance, Relation::at_most);
  return report;
}

std::vector<double> hap_ladder() { return {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}; }

HapResult hap_radius(const SampledSignal& g, const PointSet& ps, double epsilon,
                     std::span<const PhasePoint> probe_points) {
  if (!(epsilon > 0.0)) throw ConfigError("hap radius needs epsilon > 0");
  if (probe_points.empty()) throw ConfigError("hap radius needs at least one probe point");
  HapResult out;
  out.ladder = hap_ladder();
  const SampledSignal phi = window(g.grid());
  std::vector<double> probe_norm;
  for (const auto& p : probe_points) probe_norm.push_back(norm_sq(translate_modulate(phi, p.x, p.y)));

  for (double d : out.ladder) {
    double worst = 0.0;
    for (std::size_t i = 0; i < probe_points.size(); ++i) {
      const PhasePoint p = probe_points[i];
      std::vector<PhasePoint> near;
      for (const auto& l : ps.points()) {
        if (Cube{p, d}.contains(l)) near.push_back(l);
      }
      double energy = 0.0;
      if (!near.empty()) {
        const GaborSection section = section_on_points(g, near);
        const GramSpectrum spectrum(gram_matrix(section));
        energy = projection_energy_at(section, spectrum, p);
      }
      worst = std::max(worst, std::max(0.0, probe_norm[i] - energy));
    }
    out.errors.push_back(worst);
    out.best_error = worst;
    if (worst <= epsilon) {
      out.radius = d;
      break;
    }
  }
  return out;
}

}  // namespace gabden
