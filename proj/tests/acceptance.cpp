// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion ...]; with no arguments every criterion runs.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gabden/frames.hpp"
#include "gabden/pointset.hpp"
#include "gabden/runner.hpp"
#include "gabden/stft.hpp"
#include "gabden/theorems.hpp"

using namespace gabden;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds, 0 for none
  std::function<Outcome()> body;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SampledSignal preset(PresetKind kind, std::vector<double> params = {}) {
  return make_preset(Preset{kind, std::move(params)}, default_time_grid());
}

SampledSignal phi() { return window(default_time_grid()); }

Outcome gaussian_oracle() {
  const PhaseGrid grid{{-2.0, 2.0, 0.1}, {-2.0, 2.0, 0.1}};
  const STFTField field = stft_field(phi(), grid);
  double worst = 0.0;
  std::size_t nodes = 0;
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    for (std::size_t j = 0; j < grid.ny(); ++j) {
      const PhasePoint p = grid.node(i, j);
      const double want = std::exp(-0.5 * p.x * p.x - 0.5 * kPi * kPi * p.y * p.y);
      worst = std::max(worst, std::abs(std::abs(field.at(i, j)) - want) / want);
      ++nodes;
    }
  }
  return {nodes == 41 * 41 && worst <= 1e-5, fmt("%zu nodes, max relative error %.3e (tol 1e-5)", nodes, worst)};
}

Outcome unitarity() {
  const PhaseGrid grid = PhaseGrid::square(8.0, 0.05);
  const std::pair<const char*, SampledSignal> signals[] = {{"gaussian", phi()},
                                                           {"hermite_1", preset(PresetKind::hermite, {1.0})},
                                                           {"indicator(a=1)", preset(PresetKind::indicator, {1.0})}};
  bool ok = true;
  std::string detail;
  for (const auto& [name, g] : signals) {
    const double n = norm_sq(g);
    const double dev = std::abs(stft_field(g, grid).norm_sq() - n) / n;
    ok = ok && dev <= 5e-3;
    detail += fmt("%s %.3e%s ", name, dev, dev <= 5e-3 ? "" : "!");
  }
  return {ok, detail + "(relative deviation, tol 5e-3)"};
}

Outcome covariance() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<PhasePoint> samples;
  for (int i = 0; i < 100; ++i) samples.push_back({u(rng), u(rng)});
  const std::vector<PhasePoint> shifts = {{0.5, 0.5}, {1.0, -0.5}, {-1.5, 0.25}, {2.0, 1.0}, {0.3, -1.2}};
  double worst = 0.0;
  int runs = 0;
  for (const auto& g : {phi(), preset(PresetKind::hermite, {1.0}), preset(PresetKind::hermite, {2.0})}) {
    for (const auto& s : shifts) {
      worst = std::max(worst, check_covariance(g, s, samples).check("max_modulus_discrepancy").measured);
      ++runs;
    }
  }
  return {worst <= 1e-5, fmt("%d runs x 100 points, max discrepancy %.3e (tol 1e-5)", runs, worst)};
}

std::vector<PhasePoint> integer_section(int atoms) {
  if (atoms == 1) return {{0.0, 0.0}};
  if (atoms == 5) return {{0.0, 0.0}, {1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
  std::vector<PhasePoint> pts;
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) pts.push_back({double(i), double(j)});
  }
  return pts;
}

Outcome trace_identity() {
  bool ok = true;
  std::string detail;
  const SampledSignal g = phi();
  for (int atoms : {1, 5, 9}) {
    const auto pts = integer_section(atoms);
    const auto rep = trace_identity_check(section_on_points(g, pts), Cube{{0.0, 0.0}, 9.0}, 0.1);
    const double dev = rep.check("relative_deviation").measured;
    ok = ok && dev <= 0.02;
    detail += fmt("dim %d: %.4f (dev %.2e) ", atoms, rep.measurement("integral"), dev);
  }
  return {ok, detail + "(tol 2%)"};
}

Outcome biorthogonal_sum() {
  const auto section = section_on_points(phi(), integer_section(9));
  const PhaseGrid grid{{-3.0, 3.0, 0.1}, {-3.0, 3.0, 0.1}};
  const auto rep = biorthogonal_sum_field(section, dual_system(section), grid);
  return {rep.pass() && grid.nx() == 61 && grid.ny() == 61,
          fmt("%zux%zu grid, |Im S| %.2e, Re S in [%.2e, 1%+.2e], |S - energy| %.2e", grid.nx(), grid.ny(),
              rep.check("max_abs_imag").measured, rep.check("min_real").measured,
              rep.check("max_real").measured - 1.0, rep.check("max_projection_mismatch").measured)};
}

Outcome error_integral_decay() {
  const STFTField field = stft_field(phi(), PhaseGrid::square(9.0, 0.1));
  std::vector<double> q;
  std::string detail;
  for (double R : {1.0, 2.0, 4.0, 8.0}) {
    q.push_back(error_integral(field, R) / (R * R));
    detail += fmt("R=%g: %.4f ", R, q.back());
  }
  bool ok = q.back() < 0.2 * q.front();
  for (std::size_t i = 1; i < q.size(); ++i) ok = ok && q[i] < q[i - 1];
  return {ok, detail + fmt("(last/first %.3f, need < 0.2)", q.back() / q.front())};
}

Outcome rho_consistency() {
  bool ok = true;
  std::string detail;
  const std::vector<double> radii = {2.0, 4.0, 8.0, 16.0};
  for (double a : {1.0, 2.0, 3.0}) {
    const auto rep = err2_bound_check(phi(), WeightExponent(a), radii);
    const double drift = rep.check("constant_drift").measured;
    ok = ok && rep.pass();
    detail += fmt("a=%g: c %.4f -> %.4f (drift %.1f%%) ", a, rep.constant("c"), rep.constant("c_extended"),
                  100.0 * drift);
  }
  return {ok, detail + "(tol 20%)"};
}

Outcome density_theorem() {
  std::vector<double> radii;
  for (int R = 2; R <= 10; ++R) radii.push_back(R);
  CaseSpec sparse;
  sparse.name = "2Z2";
  sparse.generators = {Preset{}};
  sparse.points = Lattice2D{{2.0, 0.0}, {0.0, 2.0}};
  sparse.radii = radii;
  sparse.hypothesis = Hypothesis::riesz_sequence;
  sparse.quad.seed = 8;
  const auto r1 = verify_density_theorem(sparse);
  bool envelope = true;
  for (double R : radii) {
    envelope = envelope && r1.measurement(fmt("normalized_sup[R=%g]", R)) <= 1.0 + (4 * R + 1) / (4 * R * R);
  }

  CaseSpec dense = sparse;
  dense.name = "0.5Z2";
  dense.points = Lattice2D{{0.5, 0.0}, {0.0, 0.5}};
  dense.hypothesis = Hypothesis::frame;
  const auto r2 = verify_density_theorem(dense);
  // smallest c with inf/(2R)^2 >= 4 (1 - c/R), fitted on R <= 6 and checked on all R
  double c = 0.0;
  for (double R : radii) {
    if (R <= 6) c = std::max(c, R * (1.0 - r2.measurement(fmt("normalized_inf[R=%g]", R)) / 4.0));
  }
  bool fitted = std::isfinite(c);
  for (double R : radii) fitted = fitted && r2.measurement(fmt("normalized_inf[R=%g]", R)) >= 4.0 * (1.0 - c / R) - 1e-12;

  return {envelope && r1.pass() && r2.pass() && fitted,
          fmt("2Z2: envelope %s, part 1 %s (margin %.3g); 0.5Z2: part 2 %s (margin %.3g), fitted c = %.3g %s",
              envelope ? "ok" : "violated", r1.pass() ? "pass" : to_string(r1.verdict()).c_str(), r1.margin(),
              r2.pass() ? "pass" : to_string(r2.verdict()).c_str(), r2.margin(), c, fitted ? "holds" : "fails")};
}

Outcome lattice_machinery() {
  double worst = 0.0;
  for (const auto& g : {phi(), preset(PresetKind::hermite, {1.0}), preset(PresetKind::indicator, {0.0, 1.0})}) {
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) worst = std::max(worst, commutation_phase(-1.0 + 0.5 * i, -1.0 + 0.5 * j, g).residual);
    }
  }
  const auto box = preset(PresetKind::indicator, {0.0, 1.0});
  const auto rep = shifted_dual_biorthogonality(Lattice2D{}, box, box, 7, 1e-8);
  const double off = rep.check("max_off_diagonal").measured;
  return {worst <= 1e-6 && rep.pass() && off <= 1e-8,
          fmt("commutation residual %.2e (tol 1e-6); 7x7 off-diagonal %.2e (tol 1e-8)", worst, off)};
}

std::size_t naive_count(const std::vector<PhasePoint>& pts, PhasePoint c, double R) {
  std::size_t n = 0;
  for (const auto& p : pts) n += std::abs(p.x - c.x) <= R + 1e-9 && std::abs(p.y - c.y) <= R + 1e-9;
  return n;
}

Outcome sweep_vs_brute() {
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<int> size(1, 100);
  std::uniform_int_distribution<int> cell(-60, 60);
  const Cube region{{0.0, 0.0}, 1.0};
  const double res = 0.01;
  const long steps = std::lround(2.0 * region.half_side / res);
  int max_ok = 0, min_ok = 0, runs = 0;
  for (int set = 0; set < 50; ++set) {
    std::vector<PhasePoint> pts;
    const int n = size(rng);
    while (static_cast<int>(pts.size()) < n) {
      const PhasePoint p{0.05 * cell(rng), 0.05 * cell(rng)};
      if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
    }
    for (double R : {0.5, 1.0, 2.0}) {
      std::size_t lo = SIZE_MAX, hi = 0;
      for (long i = 0; i <= steps; ++i) {
        for (long j = 0; j <= steps; ++j) {
          const std::size_t k = naive_count(pts, {-region.half_side + i * res, -region.half_side + j * res}, R);
          lo = std::min(lo, k);
          hi = std::max(hi, k);
        }
      }
      const auto e = extremal_counts(pts, R, region);
      max_ok += e.max == hi;
      min_ok += e.min == lo;
      ++runs;
    }
  }
  return {max_ok == runs && min_ok == runs, fmt("max exact %d/%d, min exact %d/%d", max_ok, runs, min_ok, runs)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("gabden_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "verify.json") << R"({"seed": 2024, "checks": [
  {"name": "z2", "kind": "density_theorem", "case": {"generators": [{"kind": "gaussian"}],
   "points": {"kind": "lattice", "v": [1, 0], "w": [0, 1], "window": {"half_side": 14}},
   "radii": [2, 3, 4, 5], "hypothesis": "riesz_sequence"}},
  {"name": "cover", "kind": "covering", "generator": {"kind": "hermite", "params": [1]},
   "points": {"kind": "lattice", "v": [0.4, 0], "w": [0, 0.4], "window": {"half_side": 3}},
   "cube": {"half_side": 3}, "samples": 50},
  {"name": "err2", "kind": "err2", "generator": {"kind": "gaussian"}, "alpha": 1, "radii": [2, 4]},
  {"name": "trace", "kind": "trace_identity", "generator": {"kind": "gaussian"},
   "points": {"kind": "list", "points": [[0, 0], [1, 0], [0, 1]]}, "box": {"half_side": 6}, "step": 0.1},
  {"name": "duals", "kind": "shifted_duals", "lattice": {"v": [1, 0], "w": [0, 1]},
   "g": {"kind": "indicator", "params": [0, 1]}, "h": {"kind": "indicator", "params": [0, 1]}, "index_window": 3}
  ]})";
  std::vector<std::string> runs[2];
  std::vector<int> codes;
  for (int k = 0; k < 2; ++k) {
    RunConfig rc;
    rc.command = Command::verify;
    rc.config_path = dir / "verify.json";
    rc.out_dir = dir / ("run" + std::to_string(k));
    std::ostringstream log;
    codes.push_back(run(rc, log));
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(rc.out_dir)) {
      if (e.path().filename() != "manifest.json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) runs[k].push_back(f.filename().string() + "\n" + slurp(f));
  }
  fs::remove_all(dir);
  const bool same = runs[0] == runs[1] && !runs[0].empty();
  return {same && codes[0] == codes[1],
          fmt("%zu reports, exit codes %d/%d, byte-identical: %s", runs[0].size(), codes[0], codes[1],
              same ? "yes" : "no")};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "Gaussian STFT oracle", 10.0, gaussian_oracle},
      {2, "STFT unitarity on [-8,8]^2", 60.0, unitarity},
      {3, "covariance", 0.0, covariance},
      {4, "trace identity", 300.0, trace_identity},
      {5, "biorthogonal sum", 0.0, biorthogonal_sum},
      {6, "error integral decay", 0.0, error_integral_decay},
      {7, "rho_alpha constant stability", 0.0, rho_consistency},
      {8, "density theorem desk check", 0.0, density_theorem},
      {9, "lattice commutation and shifted duals", 0.0, lattice_machinery},
      {10, "sweep vs brute-force counting", 0.0, sweep_vs_brute},
      {11, "verify determinism", 0.0, determinism},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  int failed = 0, ran = 0;
  for (const auto& c : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0.0 && secs >= c.time_limit) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s limit", c.time_limit);
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail
              << fmt(" (%.2f s)", secs) << std::endl;
    failed += !o.pass;
    ++ran;
  }
  if (ran == 0) {
    std::cerr << "no criterion matches the arguments\n";
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
