#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gabden/errors.hpp"
#include "gabden/stft.hpp"

using namespace gabden;

namespace {

const double kC = std::pow(2.0 / kPi, 0.25);

double gauss_modulus(double x, double y) { return std::exp(-0.5 * x * x - 0.5 * kPi * kPi * y * y); }

// V_phi f(x, y) by a fine midpoint rule, independent of the library grids.
template <typename F>
complex brute_stft(F f, double x, double y) {
  const double h = 1e-3;
  complex acc{0.0, 0.0};
  for (double t = -14.0 + h / 2; t < 14.0; t += h) {
    acc += f(t) * kC * std::exp(-(t - x) * (t - x)) * std::polar(1.0, -kTwoPi * y * t);
  }
  return acc * h;
}

double hermite1(double t) { return std::sqrt(2.0) * std::pow(kPi, -0.25) * t * std::exp(-0.5 * t * t); }

}  // namespace

TEST_CASE("window") {
  CHECK(window_value(0.0) == doctest::Approx(0.893244).epsilon(1e-6));
  CHECK(window_value(0.0) == kC);
  CHECK(norm_sq(window(default_time_grid())) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(window(TimeGrid(8.0, 0.3)), ResolutionError);
}

TEST_CASE("stft of the window matches the closed form") {
  const auto phi = window(default_time_grid());
  CHECK(std::abs(stft_point(phi, {0.0, 0.0}) - 1.0) < 1e-8);
  for (double x : {-2.0, -0.7, 0.0, 0.4, 1.9}) {
    for (double y : {-1.1, -0.3, 0.0, 0.25, 0.9}) {
      const complex v = stft_point(phi, {x, y});
      CHECK(std::abs(std::abs(v) - gauss_modulus(x, y)) < 1e-6);
      const complex closed = gauss_modulus(x, y) * std::polar(1.0, -kPi * x * y);
      CHECK(std::abs(v - closed) < 1e-6);
      CHECK(std::abs(gaussian_ambiguity({x, y}) - closed) < 1e-14);
    }
  }
}

TEST_CASE("stft of a shifted atom matches the closed form") {
  const TimeGrid grid = default_time_grid();
  const double lambda = 0.8, mu = -0.6;
  const auto atom = translate_modulate(window(grid), lambda, mu);
  for (double x : {-1.0, 0.5, 1.5}) {
    for (double y : {-1.0, 0.0, 0.3}) {
      const complex want = brute_stft(
          [&](double t) { return kC * std::exp(-(t - lambda) * (t - lambda)) * std::polar(1.0, kTwoPi * mu * t); }, x,
          y);
      CHECK(std::abs(gaussian_atom_stft(lambda, mu, {x, y}) - want) < 1e-9);
      CHECK(std::abs(stft_point(atom, {x, y}) - want) < 1e-6);
    }
  }
}

TEST_CASE("stft of hermite_1 against brute quadrature") {
  const auto h1 = make_preset(PresetKind::hermite, {1.0}, default_time_grid());
  for (const PhasePoint p : {PhasePoint{0.3, 0.2}, PhasePoint{-1.2, 0.5}, PhasePoint{2.0, -0.7}}) {
    CHECK(std::abs(stft_point(h1, p) - brute_stft(hermite1, p.x, p.y)) < 1e-6);
  }
}

TEST_CASE("stft of zero and empty grids") {
  const auto z = SampledSignal::zero(default_time_grid());
  CHECK(stft_point(z, {0.5, 0.5}) == complex(0.0, 0.0));
  const PhaseGrid empty{{0.0, -1.0, 0.1}, {0.0, 1.0, 0.1}};
  CHECK(stft_field(window(default_time_grid()), empty).empty());
}

TEST_CASE("stft_point rejects windows off the grid") {
  const auto phi = window(TimeGrid::midpoint(4.0, 0.01));
  CHECK_THROWS_AS(stft_point(phi, {3.9, 0.0}), TruncationError);
}

TEST_CASE("field maximum and Cauchy-Schwarz") {
  const auto phi = window(default_time_grid());
  const auto field = stft_field(phi, PhaseGrid::square(3.0, 0.25));
  double best = -1.0;
  PhasePoint arg;
  for (std::size_t i = 0; i < field.grid().nx(); ++i) {
    for (std::size_t j = 0; j < field.grid().ny(); ++j) {
      const double m = std::abs(field.at(i, j));
      CHECK(m <= 1.0 + 1e-12);
      if (m > best) {
        best = m;
        arg = field.grid().node(i, j);
      }
    }
  }
  CHECK(std::abs(arg.x) < 1e-12);
  CHECK(std::abs(arg.y) < 1e-12);

  const auto h3 = make_preset(PresetKind::hermite, {3.0}, default_time_grid());
  const double nh = std::sqrt(norm_sq(h3));
  const auto f3 = stft_field(h3, PhaseGrid::square(3.0, 0.25));
  for (const complex v : f3.values()) CHECK(std::abs(v) <= nh + 1e-12);
}

TEST_CASE("field norm and Parseval") {
  const auto phi = window(default_time_grid());
  const auto field = stft_field(phi, PhaseGrid::square(8.0, 0.1));
  CHECK(std::abs(field.norm_sq() - 1.0) < 1e-3);

  const FieldMass mass(field);
  CHECK(mass.total() == doctest::Approx(field.norm_sq()).epsilon(1e-12));
  double prev = 0.0;
  for (double r : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double m = mass.in_cube({{0.0, 0.0}, r});
    CHECK(m >= prev - 1e-15);
    prev = m;
  }
  // closed-form mass of |V phi phi|^2 on Q_0(1)
  const double exact = std::erf(1.0) * std::erf(kPi);
  CHECK(std::abs(mass.in_cube({{0.0, 0.0}, 1.0}) - exact) < 2e-3);
}

TEST_CASE("FieldMass partial cells against a brute sum") {
  const auto h1 = make_preset(PresetKind::hermite, {1.0}, default_time_grid());
  const auto field = stft_field(h1, PhaseGrid::square(4.0, 0.2));
  const FieldMass mass(field);
  const PhaseGrid& g = field.grid();
  const Cube q{{0.33, -0.71}, 1.27};
  double brute = 0.0;
  auto overlap = [](double c, double h, double lo, double hi) {
    return std::max(0.0, std::min(c + h / 2, hi) - std::max(c - h / 2, lo)) / h;
  };
  for (std::size_t i = 0; i < g.nx(); ++i) {
    for (std::size_t j = 0; j < g.ny(); ++j) {
      const PhasePoint p = g.node(i, j);
      brute += std::norm(field.at(i, j)) * g.cell_area() *
               overlap(p.x, g.x.step, q.center.x - q.half_side, q.center.x + q.half_side) *
               overlap(p.y, g.y.step, q.center.y - q.half_side, q.center.y + q.half_side);
    }
  }
  CHECK(mass.in_cube(q) == doctest::Approx(brute).epsilon(1e-10));
  CHECK(mass.outside_cube(q) == doctest::Approx(mass.total() - brute).epsilon(1e-10));
}

TEST_CASE("covariance") {
  const auto phi = window(default_time_grid());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<PhasePoint> pts;
  for (int i = 0; i < 100; ++i) pts.push_back({u(rng), u(rng)});

  const auto zero_shift = check_covariance(phi, {0.0, 0.0}, pts);
  CHECK(zero_shift.check("max_modulus_discrepancy").measured == 0.0);

  const auto r1 = check_covariance(phi, {1.0, 0.5}, pts);
  CHECK(r1.pass());
  CHECK(r1.check("max_modulus_discrepancy").measured <= 1e-5);

  const auto h1 = make_preset(PresetKind::hermite, {1.0}, default_time_grid());
  const auto r2 = check_covariance(h1, {0.5, 0.5}, pts);
  CHECK(r2.pass());
  CHECK(r2.check("max_modulus_discrepancy").measured <= 1e-5);

  // a non-preset signal goes through interpolation
  std::vector<complex> raw(h1.values().begin(), h1.values().end());
  const auto r3 = check_covariance(SampledSignal(h1.grid(), raw), {0.5, 0.5}, pts);
  CHECK(r3.check("max_modulus_discrepancy").measured <= 1e-4);
}

TEST_CASE("weighted field norm") {
  const auto phi = window(default_time_grid());
  const auto w6 = weighted_field_norm_sq(stft_field(phi, PhaseGrid::square(6.0, 0.1)), WeightExponent(2.0));
  const auto w8 = weighted_field_norm_sq(stft_field(phi, PhaseGrid::square(8.0, 0.1)), WeightExponent(2.0));
  CHECK(std::isfinite(w8.value));
  CHECK(w8.converged);
  CHECK(std::abs(w6.value - w8.value) <= 0.01 * w8.value);
  // int int (x^2 + y^2) e^{-x^2 - pi^2 y^2} dx dy = 1/2 + 1/(2 pi^2)
  const double exact = 0.5 + 0.5 / (kPi * kPi);
  CHECK(w8.value == doctest::Approx(exact).epsilon(1e-3));

  const auto z = stft_field(SampledSignal::zero(default_time_grid()), PhaseGrid::square(4.0, 0.2));
  CHECK(weighted_field_norm_sq(z, WeightExponent(2.0)).value == 0.0);

  for (const Preset& p : {Preset{PresetKind::gaussian, {}}, Preset{PresetKind::hermite, {1.0}},
                          Preset{PresetKind::hermite, {2.0}}}) {
    const auto g = make_preset(p, default_time_grid());
    for (double a : {1.0, 2.0}) {
      const auto w = weighted_field_norm_sq(stft_field(g, PhaseGrid::square(8.0, 0.1)), WeightExponent(a));
      CHECK(w.converged);
      CHECK(w.value <= weighted_transfer_bound(g, WeightExponent(a)));
    }
  }
}

TEST_CASE("field output") {
  const auto phi = window(default_time_grid());
  const auto field = stft_field(phi, PhaseGrid::square(0.5, 0.5));
  std::ostringstream out;
  field.write_csv(out);
  CHECK(out.str().rfind("x,y,re,im,modulus\n", 0) == 0);
  const Json j = field.to_json();
  CHECK(j.contains("grid"));
}
