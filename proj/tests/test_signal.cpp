#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gabden/errors.hpp"
#include "gabden/signal.hpp"

using namespace gabden;

namespace {

// Physicists' Hermite polynomial by the three-term recurrence.
double hermite_poly(int k, double t) {
  double h0 = 1.0, h1 = 2.0 * t;
  if (k == 0) return h0;
  for (int n = 1; n < k; ++n) {
    const double h2 = 2.0 * t * h1 - 2.0 * n * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

double hermite_oracle(int k, double t) {
  const double norm = std::sqrt(std::pow(2.0, k) * std::tgamma(k + 1.0) * std::sqrt(kPi));
  return hermite_poly(k, t) * std::exp(-0.5 * t * t) / norm;
}

const double kC = std::pow(2.0 / kPi, 0.25);

}  // namespace

TEST_CASE("time grids") {
  const TimeGrid g(1.0, 0.5);
  CHECK(g.count() == 5);
  CHECK(g.first() == doctest::Approx(-1.0));
  CHECK(g.last() == doctest::Approx(1.0));

  const TimeGrid m = default_time_grid();
  CHECK(m.count() == 2400);
  CHECK(m.step() == doctest::Approx(0.01));
  CHECK(m.first() == doctest::Approx(-11.995));
  CHECK(m.last() == doctest::Approx(11.995));
}

TEST_CASE("gaussian preset is normalized") {
  const TimeGrid grid(8.0, 0.005);
  const auto g = make_preset(PresetKind::gaussian, {}, grid);
  CHECK(norm_sq(g) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(evaluate(Preset{}, 0.0) - kC) < 1e-15);
  CHECK(inner_product(g, g).real() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(inner_product(g, g).imag()) < 1e-15);
}

TEST_CASE("indicator preset") {
  for (const TimeGrid& grid : {default_time_grid(), TimeGrid::midpoint(4.0, 0.05), TimeGrid::midpoint(3.0, 0.02)}) {
    const auto f = make_preset(PresetKind::indicator, {0.5}, grid);
    CHECK(norm_sq(f) == doctest::Approx(1.0).epsilon(1e-9));
  }
  // off-lattice jumps cost at most one cell
  for (const TimeGrid& grid : {TimeGrid(4.0, 0.01), TimeGrid(4.0, 0.007), TimeGrid(5.0, 0.013)}) {
    const auto f = make_preset(PresetKind::indicator, {0.5}, grid);
    CHECK(std::abs(norm_sq(f) - 1.0) <= grid.step());
  }
  const auto lohi = make_preset(PresetKind::indicator, {0.0, 1.0}, default_time_grid());
  CHECK(norm_sq(lohi) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(evaluate({PresetKind::indicator, {0.0, 1.0}}, 0.5).real() == 1.0);
  CHECK(evaluate({PresetKind::indicator, {0.0, 1.0}}, 1.5).real() == 0.0);
}

TEST_CASE("hermite presets match the recurrence oracle and are orthonormal") {
  const TimeGrid grid(12.0, 0.005);
  std::vector<SampledSignal> h;
  for (int k = 0; k < 4; ++k) {
    h.push_back(make_preset(PresetKind::hermite, {static_cast<double>(k)}, grid));
    for (double t : {-2.3, -0.4, 0.0, 0.7, 3.1}) {
      CHECK(std::abs(evaluate({PresetKind::hermite, {static_cast<double>(k)}}, t) - hermite_oracle(k, t)) < 1e-12);
    }
  }
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      const complex ip = inner_product(h[j], h[k]);
      CHECK(std::abs(ip - complex(j == k ? 1.0 : 0.0, 0.0)) < 1e-6);
    }
  }
}

TEST_CASE("preset validation") {
  CHECK_THROWS_AS(parse_preset_kind("sinc"), ConfigError);
  CHECK_THROWS_AS(make_preset(PresetKind::indicator, {0.0}, default_time_grid()), ConfigError);
  CHECK_THROWS_AS(make_preset(PresetKind::indicator, {-1.0}, default_time_grid()), ConfigError);
  CHECK_THROWS_AS(make_preset(PresetKind::hermite, {1.5}, default_time_grid()), ConfigError);
  CHECK_THROWS_AS(make_preset(PresetKind::hermite, {-1.0}, default_time_grid()), ConfigError);
  CHECK_THROWS_AS(make_preset(PresetKind::modulated_indicator, {0.5}, default_time_grid()), ConfigError);
  CHECK_THROWS_AS(make_preset(PresetKind::gaussian, {}, TimeGrid(8.0, 0.5)), ResolutionError);
  CHECK_THROWS_AS(WeightExponent(0.0), ConfigError);
}

TEST_CASE("inner product basics") {
  const TimeGrid grid = default_time_grid();
  const auto z = SampledSignal::zero(grid);
  CHECK(inner_product(z, z) == complex(0.0, 0.0));

  const auto h0 = make_preset(PresetKind::hermite, {0.0}, grid);
  const auto h1 = make_preset(PresetKind::hermite, {1.0}, grid);
  CHECK(std::abs(inner_product(h0, h1)) < 1e-6);

  const auto m = make_preset(PresetKind::modulated_indicator, {3.0}, grid);
  const auto g = make_preset(PresetKind::gaussian, {}, grid);
  CHECK(std::abs(inner_product(m, g) - std::conj(inner_product(g, m))) < 1e-15);

  CHECK_THROWS_AS(inner_product(g, make_preset(PresetKind::gaussian, {}, TimeGrid(12.0, 0.01))), GridMismatchError);
}

TEST_CASE("quadrature form is positive semidefinite") {
  const TimeGrid grid = default_time_grid();
  const std::vector<SampledSignal> basis = {make_preset(PresetKind::gaussian, {}, grid),
                                            make_preset(PresetKind::hermite, {2.0}, grid),
                                            make_preset(PresetKind::modulated_indicator, {1.0}, grid),
                                            make_preset(PresetKind::indicator, {0.3}, grid)};
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<complex> c;
    for (std::size_t i = 0; i < basis.size(); ++i) c.emplace_back(n01(rng), n01(rng));
    const auto f = linear_combination(c, basis);
    CHECK(inner_product(f, f).real() >= 0.0);
    CHECK(std::abs(inner_product(f, f).imag()) < 1e-12);
  }
}

TEST_CASE("translate_modulate") {
  const TimeGrid grid = default_time_grid();
  const auto g = make_preset(PresetKind::gaussian, {}, grid);

  const auto same = translate_modulate(g, 0.0, 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(same[k] == g[k]);

  const auto g11 = translate_modulate(g, 1.0, 1.0);
  CHECK(norm_sq(g11) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(inner_product(g11, g)) == doctest::Approx(std::exp(-0.5 - kPi * kPi / 2.0)).epsilon(1e-6));

  // pointwise: e^{2 pi i b t} g(t - a)
  const auto g2 = translate_modulate(g, 0.37, -1.3);
  for (std::size_t k = 0; k < g.size(); k += 97) {
    const double t = grid.node(k);
    const complex want = std::polar(1.0, kTwoPi * -1.3 * t) * kC * std::exp(-(t - 0.37) * (t - 0.37));
    CHECK(std::abs(g2[k] - want) < 1e-12);
  }

  CHECK_THROWS_AS(translate_modulate(g, 11.0, 0.0), TruncationError);
}

TEST_CASE("sampled translation without a closed form") {
  const TimeGrid grid = default_time_grid();
  const auto g = make_preset(PresetKind::gaussian, {}, grid);
  std::vector<complex> raw(g.values().begin(), g.values().end());
  const SampledSignal plain(grid, raw);
  const double h = grid.step();

  auto round_trip_error = [&](const SampledSignal& s, double a, double b) {
    const auto back = translate_modulate(translate_modulate(s, a, b), -a, -b);
    const complex phase = std::polar(1.0, -kTwoPi * a * b);
    double worst = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) worst = std::max(worst, std::abs(phase * back[k] - g[k]));
    return worst;
  };

  // shifts by whole steps involve no interpolation
  CHECK(round_trip_error(plain, 52 * h, 0.8) < 1e-6);
  CHECK(round_trip_error(g, 0.523, 0.8) < 1e-6);

  // linear interpolation error h^2/8 max|f''|, once for g and once for M_b T_a g
  const double a = 0.523, b = 0.8, w = kTwoPi * b;
  const double g1 = kC * std::sqrt(2.0) * std::exp(-0.5), g2 = 2.0 * kC;
  const double bound = h * h / 8.0 * (g2 + (w * w * kC + 2.0 * w * g1 + g2));
  CHECK(round_trip_error(plain, a, b) <= bound);
  CHECK(std::abs(norm_sq(translate_modulate(plain, a, b)) - 1.0) < 1e-4);
}

TEST_CASE("fourier transform oracles") {
  const TimeGrid grid(8.0, 0.02);
  const auto g = make_preset(PresetKind::gaussian, {}, grid);
  const auto G = fourier_transform(g);
  double worst = 0.0;
  for (std::size_t j = 0; j < G.size(); ++j) {
    const double w = G.grid().node(j);
    worst = std::max(worst, std::abs(G[j] - kC * std::sqrt(kPi) * std::exp(-kPi * kPi * w * w)));
  }
  CHECK(worst < 1e-6);

  const double a = 1.0;
  const auto ind = make_preset(PresetKind::indicator, {a}, TimeGrid::midpoint(8.0, 0.02));
  const auto I = fourier_transform(ind);
  worst = 0.0;
  for (std::size_t j = 0; j < I.size(); ++j) {
    const double w = I.grid().node(j);
    if (std::abs(w) > 3.0) continue;
    const double want = std::abs(w) < 1e-12 ? 2.0 * a : std::sin(kTwoPi * a * w) / (kPi * w);
    worst = std::max(worst, std::abs(I[j] - want));
  }
  CHECK(worst < 1e-3);

  for (const Preset& p : {Preset{PresetKind::gaussian, {}}, Preset{PresetKind::hermite, {1.0}},
                          Preset{PresetKind::hermite, {3.0}}, Preset{PresetKind::indicator, {1.0}},
                          Preset{PresetKind::modulated_indicator, {2.0}}}) {
    const auto f = make_preset(p, grid);
    CHECK(norm_sq(fourier_transform(f)) / norm_sq(f) == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("weighted norms") {
  const TimeGrid grid = default_time_grid();
  CHECK(weighted_norm_sq(SampledSignal::zero(grid), WeightExponent(2.0)) == 0.0);
  const auto g = make_preset(PresetKind::gaussian, {}, grid);
  CHECK(weighted_norm_sq(g, WeightExponent(2.0)) == doctest::Approx(0.25).epsilon(1e-6));
  const auto ind = make_preset(PresetKind::indicator, {1.0}, grid);
  CHECK(std::abs(weighted_norm_sq(ind, WeightExponent(1.0)) - 1.0) < 1e-6);
}

TEST_CASE("halving the step barely moves reported values") {
  for (const Preset& p : {Preset{PresetKind::gaussian, {}}, Preset{PresetKind::hermite, {2.0}}}) {
    const auto coarse = make_preset(p, TimeGrid::midpoint(12.0, 0.02));
    const auto fine = make_preset(p, TimeGrid::midpoint(12.0, 0.01));
    CHECK(std::abs(norm_sq(coarse) - norm_sq(fine)) < 4e-8);
    CHECK(std::abs(weighted_norm_sq(coarse, WeightExponent(2.0)) - weighted_norm_sq(fine, WeightExponent(2.0))) <
          4e-6);
  }
}

TEST_CASE("csv output") {
  const auto g = make_preset(PresetKind::indicator, {0.5}, TimeGrid(1.0, 0.5));
  std::ostringstream out;
  write_csv(out, g);
  const std::string s = out.str();
  CHECK(s.rfind("t,re,im\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 6);
}
