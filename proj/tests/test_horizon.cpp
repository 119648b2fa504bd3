#include <doctest.h>

#include <cmath>

#include "defba/horizon.hpp"
#include "defba/model_io.hpp"
#include "test_util.hpp"

using namespace defba;
using testutil::Rng;

namespace {

constexpr double kLambdaToy = 9.0 / 7.0;
constexpr double kMuToy = 6.0 / 17.0;

// adaptive Simpson quadrature, used as the independent integral oracle
double simpson(double (*f)(double, double), double mu, double a, double b, double eps,
               int depth = 0) {
  const double m = 0.5 * (a + b);
  const double fa = f(a, mu), fb = f(b, mu), fm = f(m, mu);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double left = (m - a) / 6.0 * (fa + 4.0 * f(lm, mu) + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * f(rm, mu) + fb);
  if (depth > 40 || std::abs(left + right - whole) < 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, mu, a, m, eps / 2, depth + 1) + simpson(f, mu, m, b, eps / 2, depth + 1);
}

double balanced_curve(double t, double mu) { return std::exp(mu * t); }

// coarse independent root locator for the horizon equation at fixed resolution
double bisect_oracle(double lambda, double mu, double resolution) {
  const auto gap = [&](double t) {
    return integral_linear(t, lambda, 1.0) - integral_balanced(t, mu, 1.0);
  };
  double lo = 0.0, hi = 1.0;
  while (gap(hi) > 0.0) hi *= 2.0;
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Trajectory synthetic_trajectory(double t_end, double dt, double (*f)(double)) {
  const ParsedModel pm = toy_model();
  const int n = static_cast<int>(std::round(t_end / dt));
  Trajectory traj;
  traj.times.resize(n + 1);
  traj.Y.setZero(n + 1, 1);
  traj.C.setZero(n + 1, 1);
  traj.P.setZero(n + 1, 1);
  traj.fluxes.setZero(n, 3);
  traj.B.resize(n + 1);
  traj.B_o.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    traj.times[k] = k * dt;
    traj.B_o[k] = traj.B[k] = f(traj.times[k]);
  }
  (void)pm;
  return traj;
}

} // namespace

TEST_CASE("balanced integral") {
  CHECK(integral_balanced(0.0, kMuToy, 2.5) == 0.0);
  // mu -> 0 limit is B*t
  CHECK(integral_balanced(2.0, 1e-12, 2.5) == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(integral_balanced(2.0, 0.0, 2.5) == 5.0);
  // quadrature oracle at the toy parameters
  const double quad = 2.5 * simpson(balanced_curve, kMuToy, 0.0, 2.0, 1e-12);
  CHECK(integral_balanced(2.0, kMuToy, 2.5) == doctest::Approx(quad).epsilon(1e-8));
  CHECK(integral_balanced(2.0, kMuToy, 2.5) ==
        doctest::Approx(7.2649019754153435).epsilon(1e-10));
}

TEST_CASE("linear integral") {
  CHECK(integral_linear(0.0, kLambdaToy, 2.5) == 0.0);
  CHECK(integral_linear(2.0, 0.0, 2.5) == 5.0);
  CHECK(integral_linear(2.0, kLambdaToy, 2.5) == doctest::Approx(90.0 / 14.0 + 5.0).epsilon(1e-12));
}

TEST_CASE("prediction horizon root") {
  SUBCASE("equal rates mean no linear incentive") {
    CHECK_FALSE(prediction_horizon(0.5, 0.5).has_value());
    CHECK_FALSE(prediction_horizon(0.3, 0.5).has_value());
  }
  SUBCASE("toy rates against the independent bisection oracle") {
    const auto tp = prediction_horizon(kLambdaToy, kMuToy);
    REQUIRE(tp.has_value());
    CHECK(std::abs(*tp - bisect_oracle(kLambdaToy, kMuToy, 1e-6)) <= 1e-4);
    CHECK(*tp == doctest::Approx(8.602923555).epsilon(1e-6));
    // root residual, relative to the balanced integral
    const double resid =
        std::abs(integral_linear(*tp, kLambdaToy, 1.0) - integral_balanced(*tp, kMuToy, 1.0));
    CHECK(resid <= 1e-8 * integral_balanced(*tp, kMuToy, 1.0));
  }
  SUBCASE("result is independent of b_init") {
    const auto a = prediction_horizon(kLambdaToy, kMuToy, 1.0);
    const auto b = prediction_horizon(kLambdaToy, kMuToy, 100.0);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(std::abs(*a - *b) <= 1e-12);
  }
  SUBCASE("sign structure around the root") {
    const double tp = *prediction_horizon(kLambdaToy, kMuToy);
    CHECK(integral_linear(tp / 2, kLambdaToy, 1.0) > integral_balanced(tp / 2, kMuToy, 1.0));
    CHECK(integral_linear(2 * tp, kLambdaToy, 1.0) < integral_balanced(2 * tp, kMuToy, 1.0));
  }
  SUBCASE("monotone in both rates") {
    double prev = kInf;
    for (const double mu : {0.2, 0.3, 0.4, 0.5}) {
      const double tp = *prediction_horizon(1.3, mu);
      CHECK(tp <= prev + 1e-9);
      prev = tp;
    }
    prev = 0.0;
    for (const double lam : {0.45, 0.6, 0.9, 1.3}) {
      const double tp = *prediction_horizon(lam, 0.4);
      CHECK(tp >= prev - 1e-9);
      prev = tp;
    }
  }
  SUBCASE("no root below 1e6 h is a bracket failure") {
    CHECK_THROWS_AS(prediction_horizon(1.0, 0.0), BracketFailure);
  }
}

TEST_CASE("iteration time") {
  const double tp = 8.60;
  const double bound = tp - 2.0 * (1.0 / kMuToy - 1.0 / kLambdaToy);
  CHECK(iteration_time(tp, kLambdaToy, kMuToy, 0.9) == doctest::Approx(0.9 * bound).epsilon(1e-12));
  CHECK(iteration_time(tp, kLambdaToy, kMuToy, 0.9) == doctest::Approx(4.04).epsilon(1e-2));
  CHECK_THROWS_AS(iteration_time(2.5, kLambdaToy, kMuToy, 0.9), NonpositiveBound);
  CHECK_THROWS_AS(iteration_time(tp, kLambdaToy, kMuToy, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(iteration_time(tp, kLambdaToy, kMuToy, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(iteration_time(tp, kMuToy, kLambdaToy, 0.9), std::invalid_argument);
}

TEST_CASE("growth curves are continuous at the switch") {
  for (const auto kind : {GrowthCurve::Kind::linear_then_exponential,
                          GrowthCurve::Kind::exponential_then_linear}) {
    const GrowthCurve c{kind, 3.0, 2.5, kLambdaToy, kMuToy};
    CHECK(c.value(3.0 - 1e-12) == doctest::Approx(c.value(3.0 + 1e-12)).epsilon(1e-9));
    // closed-form integral against quadrature by Riemann sum
    double sum = 0.0;
    const int steps = 200000;
    for (int i = 0; i < steps; ++i) sum += c.value((i + 0.5) * 5.0 / steps) * (5.0 / steps);
    CHECK(c.integral(5.0) == doctest::Approx(sum).epsilon(1e-6));
  }
}

TEST_CASE("theorem 1: the mixed curve is maximized by the pure linear arc") {
  const double tp = 8.6;  // just inside the toy root
  CHECK(verify_theorem1(kLambdaToy, kMuToy, tp, 10000) == doctest::Approx(tp));
  // generic rate pairs, horizon at 90% of the root
  for (const double lam : {0.5, 1.0, 2.0}) {
    const double mu = lam / 2.0;
    const double tp_gen = 0.9 * *prediction_horizon(lam, mu);
    CHECK(verify_theorem1(lam, mu, tp_gen, 4001) == doctest::Approx(tp_gen));
  }
  // barely-strict rate ordering, horizon from the root as elsewhere
  const double lam_edge = kMuToy * (1.0 + 1e-6);
  const double tp_edge = 0.9 * *prediction_horizon(lam_edge, kMuToy);
  CHECK(verify_theorem1(lam_edge, kMuToy, tp_edge, 4001) == doctest::Approx(tp_edge));
}

TEST_CASE("theorem 2: the optimal switch leaves the strict bound interval") {
  const double tp = 8.6;
  const double expected = tp - 2.0 * (1.0 / kMuToy - 1.0 / kLambdaToy);
  const int grid_n = 10000;
  const double step = tp / (grid_n - 1);
  CHECK(std::abs(verify_theorem2(kLambdaToy, kMuToy, tp, grid_n) - expected) <= step + 1e-12);
  // horizon below the bound: no interior stationary point, boundary argmax
  CHECK(verify_theorem2(kLambdaToy, kMuToy, 2.0, 4001) == doctest::Approx(0.0));
  // hypothesis violations are rejected
  CHECK_THROWS_AS(verify_theorem2(kMuToy, kMuToy, tp, 100), std::invalid_argument);
}

TEST_CASE("growth classification of synthetic curves") {
  SUBCASE("pure exponential") {
    auto traj = synthetic_trajectory(3.0, 0.1, [](double t) { return 2.5 * std::exp(0.35 * t); });
    for (const auto& w : classify_growth(traj, 0.5)) CHECK(w.label == GrowthLabel::exponential);
  }
  SUBCASE("pure linear") {
    auto traj =
        synthetic_trajectory(3.0, 0.1, [](double t) { return 2.5 * (1.0 + 1.2857 * t); });
    for (const auto& w : classify_growth(traj, 0.5)) CHECK(w.label == GrowthLabel::linear);
  }
  SUBCASE("stagnant") {
    auto traj = synthetic_trajectory(3.0, 0.1, [](double) { return 2.5; });
    for (const auto& w : classify_growth(traj, 0.5)) CHECK(w.label == GrowthLabel::stagnant);
  }
  SUBCASE("optimal-form curve switches from exponential to linear") {
    auto traj = synthetic_trajectory(8.5, 0.05, [](double t) {
      const GrowthCurve c{GrowthCurve::Kind::exponential_then_linear, 4.49, 2.5, 9.0 / 7.0,
                          6.0 / 17.0};
      return c.value(t);
    });
    const auto windows = classify_growth(traj, 0.5);
    // windows clear of the switch classify cleanly; the boundary window may
    // land either way
    for (const auto& w : windows) {
      if (w.t_end <= 4.0) CHECK(w.label == GrowthLabel::exponential);
      if (w.t_begin >= 5.0) CHECK(w.label == GrowthLabel::linear);
    }
  }
  SUBCASE("too few points per window") {
    auto traj = synthetic_trajectory(3.0, 0.1, [](double t) { return 1.0 + t; });
    CHECK_THROWS_AS(classify_growth(traj, 0.15), TooFewPoints);
  }
}

TEST_CASE("horizon diagnostics for the toy model") {
  const ParsedModel pm = toy_model();
  const HorizonDiagnostics d = compute_horizon(pm.model, pm.initial_state);
  CHECK(d.b_init == doctest::Approx(2.5));
  CHECK(d.lambda_s == doctest::Approx(45.0 / 14.0).epsilon(1e-9));
  CHECK(d.lambda_r == doctest::Approx(9.0 / 7.0).epsilon(1e-9));
  CHECK(d.mu_bal == doctest::Approx(6.0 / 17.0).epsilon(1e-9));
  REQUIRE(d.t_p_root.has_value());
  CHECK(d.t_p == doctest::Approx(8.602923555).epsilon(1e-6));
  CHECK(d.t_c == doctest::Approx(4.0426312).epsilon(1e-5));
  CHECK(d.t_c > 0.0);
  CHECK(d.t_c < d.t_p);
}
