#include "gabden/runner.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "gabden/case_spec.hpp"
#include "gabden/errors.hpp"
#include "gabden/frames.hpp"
#include "gabden/pointset.hpp"
#include "gabden/report.hpp"
#include "gabden/stft.hpp"
#include "gabden/theorems.hpp"

namespace gabden {

namespace fs = std::filesystem;
using namespace cfg;

namespace {

struct Artifact {
  std::string path;
  std::string content;
};

struct Outputs {
  std::vector<Artifact> files;
  Json summary = Json::array();
  bool hypothesis_failure = false;
  bool verification_failure = false;

  void add(std::string path, std::string content) { files.push_back({std::move(path), std::move(content)}); }

  void add_json(std::string path, const Json& j) { add(std::move(path), j.dump(2) + "\n"); }

  void record(const std::string& name, const std::string& kind, const VerificationReport& r) {
    if (r.hypothesis_failed()) hypothesis_failure = true;
    if (!r.pass()) verification_failure = true;
    Json row;
    row["name"] = name;
    row["kind"] = kind;
    row["verdict"] = to_string(r.verdict());
    const Json full = r.to_json();
    row["margin"] = full["margin"];
    summary.push_back(row);
    add_json(name + ".json", full);
  }
};

using Task = std::function<void(Outputs&)>;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::string name_of(const Json& j, const std::string& what, std::set<std::string>& taken) {
  const Json& n = need(j, "name", what);
  if (!n.is_string() || n.get<std::string>().empty()) throw ConfigError(what + " name must be a non-empty string");
  const std::string name = n.get<std::string>();
  if (name.find_first_of("/\\") != std::string::npos || name == "." || name == "..") {
    throw ConfigError("name '" + name + "' cannot be used as a file name");
  }
  if (name == "manifest" || name == "summary" || !taken.insert(name).second) {
    throw ConfigError("name '" + name + "' is reserved or repeated");
  }
  return name;
}

const Json& entries(const Json& config, const std::string& key) {
  const Json& list = need(config, key, "config");
  if (!list.is_array() || list.empty()) throw ConfigError("config '" + key + "' must be a non-empty array");
  return list;
}

TimeGrid time_grid_of(const Json& j) {
  if (!j.contains("time_grid")) return default_time_grid();
  const Json& tg = j.at("time_grid");
  require_object(tg, "time_grid");
  allow_keys(tg, "time_grid", {"extent", "step"});
  const double extent = tg.contains("extent") ? number(tg.at("extent"), "time_grid.extent") : 12.0;
  const double step = tg.contains("step") ? number(tg.at("step"), "time_grid.step") : 0.01;
  if (!(extent > 0.0) || !(step > 0.0)) throw ConfigError("time_grid extent and step must be positive");
  return TimeGrid::midpoint(extent, step);
}

std::string csv(const std::function<void(std::ostream&)>& write) {
  std::ostringstream os;
  write(os);
  return os.str();
}

// stft: {"signals": [{"name", "preset", "grid", "shift"?, "time_grid"?}]}
std::vector<Task> plan_stft(const Json& config) {
  allow_keys(config, "stft config", {"signals"});
  std::vector<Task> tasks;
  std::set<std::string> names;
  for (const auto& s : entries(config, "signals")) {
    require_object(s, "signal");
    allow_keys(s, "signal", {"name", "preset", "grid", "shift", "time_grid"});
    const std::string name = name_of(s, "signal", names);
    const Preset preset = parse_preset(need(s, "preset", "signal"));
    const PhaseGrid grid = parse_phase_grid(need(s, "grid", "signal"));
    const PhasePoint shift = s.contains("shift") ? parse_point(s.at("shift")) : PhasePoint{};
    const TimeGrid tg = time_grid_of(s);
    tasks.push_back([=](Outputs& out) {
      SampledSignal g = make_preset(preset, tg);
      if (shift.x != 0.0 || shift.y != 0.0) g = translate_modulate(g, shift.x, shift.y);
      const STFTField field = stft_field(g, grid);
      out.add(name + "_signal.csv", csv([&](std::ostream& os) { write_csv(os, g); }));
      out.add(name + "_field.csv", csv([&](std::ostream& os) { field.write_csv(os); }));
      Json j;
      j["name"] = name;
      j["source"] = field.description();
      j["shift"] = {shift.x, shift.y};
      j["signal_norm_sq"] = norm_sq(g);
      j["field_norm_sq"] = field.norm_sq();
      j["grid"] = {{"x", {grid.x.low, grid.x.high, grid.x.step}}, {"y", {grid.y.low, grid.y.high, grid.y.step}}};
      out.add_json(name + "_stft.json", j);
    });
  }
  return tasks;
}

// density: {"point_sets": [{"name", "points", "radii", "search_region"?}]}
std::vector<Task> plan_density(const Json& config, const fs::path& base) {
  allow_keys(config, "density config", {"point_sets"});
  std::vector<Task> tasks;
  std::set<std::string> names;
  for (const auto& s : entries(config, "point_sets")) {
    require_object(s, "point set");
    allow_keys(s, "point set", {"name", "points", "radii", "search_region"});
    const std::string name = name_of(s, "point set", names);
    CaseSpec c;
    c.name = name;
    c.points = parse_point_source(need(s, "points", "point set"), base);
    c.radii = numbers(need(s, "radii", "point set"), "radii");
    for (std::size_t i = 0; i < c.radii.size(); ++i) {
      if (!(c.radii[i] > 0.0) || (i > 0 && !(c.radii[i] > c.radii[i - 1]))) {
        throw ConfigError("radii must be positive and strictly increasing");
      }
    }
    if (c.radii.empty()) throw ConfigError("point set '" + name + "' has no radii");
    if (s.contains("search_region")) c.search_region = parse_cube(s.at("search_region"));
    c.quad.section_half_side = 0.0;
    tasks.push_back([c](Outputs& out) {
      const std::vector<PointSet> members = c.members();
      const Cube region = c.region();
      std::vector<PhasePoint> merged;
      double sep = std::numeric_limits<double>::infinity();
      for (const auto& m : members) {
        merged.insert(merged.end(), m.points().begin(), m.points().end());
        sep = std::min(sep, separation_constant(m));
      }
      const DensityReport d = members.size() == 1 ? density_profile(members.front(), c.radii, region)
                                                  : density_profile(PointFamily(members), c.radii, region);
      out.add(c.name + "_points.csv", csv([&](std::ostream& os) { write_points_csv(os, PointSet(merged)); }));
      out.add(c.name + "_density.csv", csv([&](std::ostream& os) { d.write_csv(os); }));
      Json j = d.to_json();
      j["name"] = c.name;
      j["points"] = merged.size();
      j["members"] = members.size();
      j["separation"] = std::isfinite(sep) ? Json(sep) : Json("inf");
      j["search_region"] = {{"center", {region.center.x, region.center.y}}, {"half_side", region.half_side}};
      out.add_json(c.name + "_density.json", j);
    });
  }
  return tasks;
}

// bounds: {"sections": [{"name", "generators", "points", "kind"?, "time_grid"?}]}
std::vector<Task> plan_bounds(const Json& config, const fs::path& base) {
  allow_keys(config, "bounds config", {"sections"});
  std::vector<Task> tasks;
  std::set<std::string> names;
  for (const auto& s : entries(config, "sections")) {
    require_object(s, "section");
    allow_keys(s, "section", {"name", "generators", "points", "kind", "time_grid"});
    const std::string name = name_of(s, "section", names);
    const Json& gj = need(s, "generators", "section");
    if (!gj.is_array() || gj.empty()) throw ConfigError("section generators must be a non-empty array");
    std::vector<Preset> presets;
    for (const auto& g : gj) presets.push_back(parse_preset(g));
    const PointSource src = parse_point_source(need(s, "points", "section"), base);
    if (std::holds_alternative<Lattice2D>(src)) throw ConfigError("section lattice needs a 'window'");
    BoundsKind kind = BoundsKind::riesz_section;
    if (s.contains("kind")) {
      const Json& k = s.at("kind");
      if (k == "frame_section") {
        kind = BoundsKind::frame_section;
      } else if (k != "riesz_section") {
        throw ConfigError("section kind must be riesz_section or frame_section");
      }
    }
    const std::size_t sets = std::holds_alternative<PointFamily>(src) ? std::get<PointFamily>(src).size() : 1;
    if (presets.size() != 1 && presets.size() != sets) {
      throw ConfigError("section '" + name + "' needs one generator or one per family member");
    }
    const TimeGrid tg = time_grid_of(s);
    tasks.push_back([=](Outputs& out) {
      std::vector<SampledSignal> gens;
      for (const auto& p : presets) gens.push_back(make_preset(p, tg));
      GaborSection section;
      if (const auto* ps = std::get_if<PointSet>(&src)) {
        section = section_on_points(gens.front(), ps->points());
      } else {
        const auto& fam = std::get<PointFamily>(src);
        if (gens.size() == 1) gens.assign(fam.size(), gens.front());
        section = section_on_family(gens, fam);
      }
      const GramMatrix gram = gram_matrix(section);
      const BoundsReport bounds = riesz_bounds(gram, kind);
      const MinimalityMargin mm = uniform_minimality_margin(gram);
      Json j;
      j["name"] = name;
      j["atoms"] = section.size();
      j["bounds"] = bounds.to_json();
      j["minimality"] = {{"margin", mm.margin},
                         {"max_dual_norm", mm.failed ? Json("inf") : Json(mm.max_dual_norm)},
                         {"failed", mm.failed}};
      out.add_json(name + "_bounds.json", j);
    });
  }
  return tasks;
}

std::vector<PhasePoint> sample_points(const Json& j, const Cube& around, std::uint64_t seed) {
  if (j.is_array()) return parse_points(j);
  if (!j.is_number_unsigned()) throw ConfigError("samples must be a count or a list of points");
  const auto n = j.get<std::size_t>();
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x5a17u};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> ux(around.center.x - around.half_side, around.center.x + around.half_side);
  std::uniform_real_distribution<double> uy(around.center.y - around.half_side, around.center.y + around.half_side);
  std::vector<PhasePoint> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = ux(rng);
    out.push_back({x, uy(rng)});
  }
  return out;
}

struct VerifyContext {
  fs::path base;
  QuadratureParams quad;
  std::optional<std::uint64_t> seed_override;
  bool seed_known = false;
};

// Quadrature for a check: config defaults, then the check's own block, then --seed.
QuadratureParams quad_for(const Json& j, const VerifyContext& ctx, const char* key = "quadrature") {
  QuadratureParams q = j.contains(key) ? parse_quadrature(j.at(key), ctx.quad) : ctx.quad;
  if (ctx.seed_override) q.seed = *ctx.seed_override;
  return q;
}

void require_seed(const Json& j, const VerifyContext& ctx, const std::string& name) {
  const bool local = j.contains("quadrature") && j.at("quadrature").contains("seed");
  if (!ctx.seed_known && !local) {
    throw ConfigError("check '" + name + "' draws random numbers and needs a seed (config 'seed' or --seed)");
  }
}

Task plan_check(const Json& j, const std::string& name, const std::string& kind, const VerifyContext& ctx) {
  if (kind == "density_theorem") {
    allow_keys(j, "density_theorem check", {"name", "kind", "case"});
    const Json& cj = need(j, "case", "check");
    require_seed(cj, ctx, name);
    CaseSpec c = parse_case(cj, ctx.base, ctx.quad);
    if (ctx.seed_override) c.quad.seed = *ctx.seed_override;
    if (c.hypothesis != Hypothesis::riesz_sequence && c.hypothesis != Hypothesis::frame) {
      throw ConfigError("check '" + name + "' needs hypothesis riesz_sequence or frame");
    }
    return [=](Outputs& out) { out.record(name, kind, verify_density_theorem(c)); };
  }
  if (kind == "uniform_minimality") {
    allow_keys(j, "uniform_minimality check", {"name", "kind", "case", "epsilons"});
    CaseSpec c = parse_case(need(j, "case", "check"), ctx.base, ctx.quad);
    if (c.hypothesis != Hypothesis::uniformly_minimal) {
      throw ConfigError("check '" + name + "' needs hypothesis uniformly_minimal");
    }
    const std::vector<double> eps = numbers(need(j, "epsilons", "check"), "epsilons");
    return [=](Outputs& out) { out.record(name, kind, verify_uniform_minimality_density(c, eps)); };
  }
  if (kind == "err2") {
    allow_keys(j, "err2 check", {"name", "kind", "generator", "alpha", "radii", "field_half_side", "field_step",
                                 "time_grid"});
    const Preset p = parse_preset(need(j, "generator", "check"));
    const double alpha = number(need(j, "alpha", "check"), "alpha");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    const std::vector<double> radii = numbers(need(j, "radii", "check"), "radii");
    Err2Options opt;
    if (auto v = optional_number(j, "field_half_side", "check")) opt.field_half_side = *v;
    if (auto v = optional_number(j, "field_step", "check")) opt.field_step = *v;
    const TimeGrid tg = time_grid_of(j);
    return [=](Outputs& out) {
      out.record(name, kind, err2_bound_check(make_preset(p, tg), WeightExponent(alpha), radii, opt));
    };
  }
  if (kind == "covering") {
    allow_keys(j, "covering check", {"name", "kind", "generator", "points", "cube", "samples", "quadrature",
                                     "time_grid"});
    require_seed(j, ctx, name);
    const Preset p = parse_preset(need(j, "generator", "check"));
    const PointSet ps = parse_point_set(need(j, "points", "check"), ctx.base);
    const Cube cube = parse_cube(need(j, "cube", "check"));
    const QuadratureParams q = quad_for(j, ctx);
    const std::vector<PhasePoint> samples =
        sample_points(need(j, "samples", "check"), Cube{cube.center, cube.half_side + 1.0}, q.seed);
    const TimeGrid tg = time_grid_of(j);
    return [=](Outputs& out) {
      const double sep = separation_constant(ps);
      const double delta = std::min(sep / (2.0 * std::sqrt(2.0)), 0.25);
      const PointEstimate pe = point_estimate_constant(delta, q.trials, q.seed);
      const STFTField field =
          stft_field(make_preset(p, tg), PhaseGrid::square(q.field_half_side, q.field_step));
      VerificationReport r = covering_inequality_check(ps, field, cube, q.kappa * pe.c_hat, samples);
      r.add_constant("C_hat", pe.c_hat);
      r.add_constant("kappa", q.kappa);
      r.add_constant("trials", static_cast<double>(pe.trials));
      r.set_input("seed", q.seed);
      out.record(name, kind, r);
    };
  }
  if (kind == "trace_identity") {
    allow_keys(j, "trace_identity check", {"name", "kind", "generator", "points", "box", "step", "time_grid"});
    const Preset p = parse_preset(need(j, "generator", "check"));
    const PointSet ps = parse_point_set(need(j, "points", "check"), ctx.base);
    const Cube box = parse_cube(need(j, "box", "check"));
    const double step = number(need(j, "step", "check"), "step");
    if (!(step > 0.0)) throw ConfigError("step must be positive");
    const TimeGrid tg = time_grid_of(j);
    return [=](Outputs& out) {
      out.record(name, kind, trace_identity_check(section_on_points(make_preset(p, tg), ps.points()), box, step));
    };
  }
  if (kind == "biorthogonal_sum") {
    allow_keys(j, "biorthogonal_sum check", {"name", "kind", "generator", "points", "grid", "time_grid"});
    const Preset p = parse_preset(need(j, "generator", "check"));
    const PointSet ps = parse_point_set(need(j, "points", "check"), ctx.base);
    const PhaseGrid grid = parse_phase_grid(need(j, "grid", "check"));
    const TimeGrid tg = time_grid_of(j);
    return [=](Outputs& out) {
      const GaborSection section = section_on_points(make_preset(p, tg), ps.points());
      out.record(name, kind, biorthogonal_sum_field(section, dual_system(section), grid));
    };
  }
  if (kind == "commutation") {
    allow_keys(j, "commutation check", {"name", "kind", "generator", "pairs", "tolerance", "time_grid"});
    const Preset p = parse_preset(need(j, "generator", "check"));
    const std::vector<PhasePoint> pairs = parse_points(need(j, "pairs", "check"));
    const double tol = j.contains("tolerance") ? number(j.at("tolerance"), "tolerance") : 1e-6;
    const TimeGrid tg = time_grid_of(j);
    return [=](Outputs& out) {
      const SampledSignal g = make_preset(p, tg);
      VerificationReport r("commutation_phase");
      r.set_input("signal", p.describe());
      r.set_input("pairs", pairs.size());
      double worst = 0.0;
      double phase_error = 0.0;
      for (const auto& ab : pairs) {
        const CommutationPhase cp = commutation_phase(ab.x, ab.y, g);
        worst = std::max(worst, cp.residual);
        phase_error = std::max(phase_error, std::abs(std::abs(cp.xi) - 1.0));
      }
      r.add_check("max_residual", worst, tol, Relation::at_most);
      r.add_measurement("max_unimodularity_error", phase_error);
      out.record(name, kind, r);
    };
  }
  if (kind == "shifted_duals") {
    allow_keys(j, "shifted_duals check", {"name", "kind", "lattice", "g", "h", "index_window", "tolerance",
                                          "time_grid"});
    const Lattice2D lat = parse_lattice(need(j, "lattice", "check"));
    const Preset g = parse_preset(need(j, "g", "check"));
    const Preset h = parse_preset(need(j, "h", "check"));
    const Json& w = need(j, "index_window", "check");
    if (!w.is_number_integer() || w.get<int>() < 1) throw ConfigError("index_window must be a positive integer");
    const int window = w.get<int>();
    const double tol = j.contains("tolerance") ? number(j.at("tolerance"), "tolerance") : 1e-6;
    const TimeGrid tg = time_grid_of(j);
    return [=](Outputs& out) {
      out.record(name, kind, shifted_dual_biorthogonality(lat, make_preset(g, tg), make_preset(h, tg), window, tol));
    };
  }
  if (kind == "hap") {
    allow_keys(j, "hap check", {"name", "kind", "generator", "points", "epsilon", "probes", "time_grid"});
    const Preset p = parse_preset(need(j, "generator", "check"));
    const PointSet ps = parse_point_set(need(j, "points", "check"), ctx.base);
    const double eps = number(need(j, "epsilon", "check"), "epsilon");
    if (!(eps > 0.0)) throw ConfigError("epsilon must be positive");
    const std::vector<PhasePoint> probes = parse_points(need(j, "probes", "check"));
    if (probes.empty()) throw ConfigError("hap check needs probe points");
    const TimeGrid tg = time_grid_of(j);
    return [=](Outputs& out) {
      const HapResult hr = hap_radius(make_preset(p, tg), ps, eps, probes);
      VerificationReport r("hap_radius");
      r.set_input("signal", p.describe());
      r.set_input("points", ps.size());
      r.set_input("epsilon", eps);
      r.set_input("probes", probes.size());
      for (std::size_t i = 0; i < hr.errors.size(); ++i) {
        std::ostringstream os;
        os << "error_sq[d=" << hr.ladder[i] << "]";
        r.add_measurement(os.str(), hr.errors[i]);
      }
      if (hr.radius) {
        r.add_constant("radius", *hr.radius);
      } else {
        r.warn("no radius on the ladder reaches epsilon");
      }
      r.add_check("worst_probe_error_sq", hr.best_error, eps, Relation::at_most);
      out.record(name, kind, r);
    };
  }
  if (kind == "covariance") {
    allow_keys(j, "covariance check", {"name", "kind", "generator", "shift", "samples", "time_grid"});
    const Preset p = parse_preset(need(j, "generator", "check"));
    const PhasePoint shift = parse_point(need(j, "shift", "check"));
    const std::vector<PhasePoint> samples = parse_points(need(j, "samples", "check"));
    const TimeGrid tg = time_grid_of(j);
    return [=](Outputs& out) { out.record(name, kind, check_covariance(make_preset(p, tg), shift, samples)); };
  }
  throw ConfigError("unknown check kind '" + kind + "'");
}

// verify: {"seed"?, "quadrature"?, "checks": [{"name", "kind", ...}]}
std::vector<Task> plan_verify(const Json& config, const fs::path& base, const RunConfig& rc) {
  allow_keys(config, "verify config", {"seed", "quadrature", "checks"});
  VerifyContext ctx;
  ctx.base = base;
  ctx.seed_override = rc.seed;
  if (config.contains("quadrature")) ctx.quad = parse_quadrature(config.at("quadrature"));
  if (config.contains("seed")) {
    if (!config.at("seed").is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
    ctx.quad.seed = config.at("seed").get<std::uint64_t>();
    ctx.seed_known = true;
  }
  if (rc.seed) {
    ctx.quad.seed = *rc.seed;
    ctx.seed_known = true;
  }
  std::vector<Task> tasks;
  std::set<std::string> names;
  for (const auto& c : entries(config, "checks")) {
    require_object(c, "check");
    const std::string name = name_of(c, "check", names);
    const Json& kind = need(c, "kind", "check");
    if (!kind.is_string()) throw ConfigError("check kind must be a string");
    tasks.push_back(plan_check(c, name, kind.get<std::string>(), ctx));
  }
  return tasks;
}

// report: {"reports": ["a.json", ...]} collects verdicts of earlier runs.
std::vector<Task> plan_report(const Json& config, const fs::path& base) {
  allow_keys(config, "report config", {"reports"});
  std::vector<std::pair<std::string, Json>> loaded;
  for (const auto& p : entries(config, "reports")) {
    if (!p.is_string()) throw ConfigError("report paths must be strings");
    fs::path path = p.get<std::string>();
    if (path.is_relative()) path = base / path;
    Json j;
    try {
      j = Json::parse(read_file(path));
    } catch (const Json::parse_error& e) {
      throw ConfigError("report " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("name") || !j.contains("verdict")) {
      throw ConfigError("report " + path.string() + " is not a verification report");
    }
    loaded.emplace_back(p.get<std::string>(), std::move(j));
  }
  return {[loaded](Outputs& out) {
    std::ostringstream table;
    table << "file,name,verdict,margin\n";
    for (const auto& [file, j] : loaded) {
      const std::string verdict = j.at("verdict").get<std::string>();
      if (verdict == "hypothesis_failure") out.hypothesis_failure = true;
      if (verdict != "pass") out.verification_failure = true;
      out.summary.push_back({{"file", file}, {"name", j.at("name")}, {"verdict", verdict}, {"margin", j["margin"]}});
      table << file << ',' << j.at("name").get<std::string>() << ',' << verdict << ',' << j["margin"].dump() << '\n';
    }
    out.add("summary.csv", table.str());
  }};
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "stft") return Command::stft;
  if (name == "density") return Command::density;
  if (name == "bounds") return Command::bounds;
  if (name == "verify") return Command::verify;
  if (name == "report") return Command::report;
  throw ConfigError("unknown command '" + name + "'");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::stft:
      return "stft";
    case Command::density:
      return "density";
    case Command::bounds:
      return "bounds";
    case Command::verify:
      return "verify";
    case Command::report:
      return "report";
  }
  return "unknown";
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

int run(const RunConfig& rc, std::ostream& log) {
  std::string raw;
  std::vector<Task> tasks;
  try {
    raw = read_file(rc.config_path);
    Json config;
    try {
      config = Json::parse(raw);
    } catch (const Json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    require_object(config, "config");
    const fs::path base = rc.config_path.parent_path();
    switch (rc.command) {
      case Command::stft:
        tasks = plan_stft(config);
        break;
      case Command::density:
        tasks = plan_density(config, base);
        break;
      case Command::bounds:
        tasks = plan_bounds(config, base);
        break;
      case Command::verify:
        tasks = plan_verify(config, base, rc);
        break;
      case Command::report:
        tasks = plan_report(config, base);
        break;
    }
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    log << "hypothesis failure: " << e.what() << '\n';
    return kExitHypothesis;
  } catch (const Error& e) {
    log << "error while reading the config: " << e.what() << '\n';
    return kExitUsage;
  }

  Outputs out;
  try {
    for (auto& t : tasks) t(out);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    log << "hypothesis failure: " << e.what() << '\n';
    return kExitHypothesis;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << '\n';
    return kExitVerification;
  }

  if (rc.command == Command::verify || rc.command == Command::report) out.add_json("summary.json", out.summary);

  std::error_code ec;
  fs::create_directories(rc.out_dir, ec);
  if (ec) {
    log << "config error: cannot create output directory " << rc.out_dir.string() << ": " << ec.message() << '\n';
    return kExitUsage;
  }
  Json manifest;
  manifest["command"] = to_string(rc.command);
  manifest["config"] = rc.config_path.string();
  manifest["config_hash"] = "fnv1a64:" + hex64(fnv1a64(raw));
  if (rc.seed) manifest["seed_override"] = *rc.seed;
  manifest["created"] = timestamp();
  Json listed = Json::array();
  for (const auto& a : out.files) {
    std::ofstream f(rc.out_dir / a.path, std::ios::binary);
    f << a.content;
    if (!f) {
      log << "cannot write " << (rc.out_dir / a.path).string() << '\n';
      return kExitUsage;
    }
    listed.push_back({{"path", a.path}, {"bytes", a.content.size()}, {"fnv1a64", hex64(fnv1a64(a.content))}});
  }
  manifest["artifacts"] = listed;
  std::ofstream mf(rc.out_dir / "manifest.json", std::ios::binary);
  mf << manifest.dump(2) << '\n';

  for (const auto& row : out.summary) {
    log << row.value("name", std::string()) << ": " << row.value("verdict", std::string()) << '\n';
  }
  if (out.hypothesis_failure) return kExitHypothesis;
  if (out.verification_failure) return kExitVerification;
  return kExitPass;
}

}  // namespace gabden
