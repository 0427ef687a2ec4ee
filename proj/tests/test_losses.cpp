#include <catch2/catch.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "rmc/losses.hpp"
#include "rmc/rng.hpp"

using namespace rmc;

namespace {

std::vector<LossSpec> all_kinds() {
  return {LossSpec::how(), LossSpec::how(2.0), LossSpec::hoc(), LossSpec::hoc(0.7),
          LossSpec::hop(0.5), LossSpec::hop(1.0), LossSpec::huber()};
}

// Reference Huber implementation, written directly from its two-branch
// definition; the hop(p = 1) reduction is checked against this.
double huber_loss_ref(double c, double x) {
  const double ax = std::abs(x);
  if (ax <= c) return 0.5 * x * x;
  return c * ax - 0.5 * c * c;
}

double huber_prox_ref(double c, double x) {
  const double ax = std::abs(x);
  if (ax <= c) return 0.0;
  return (ax - c) * (x < 0 ? -1.0 : 1.0);
}

}  // namespace

TEST_CASE("loss value: quadratic branch and boundary", "[losses]") {
  for (const LossSpec& spec : all_kinds()) {
    CHECK(loss_value(spec, 1.0, 1.0) == 0.5);  // c^2/2 at the knot
    CHECK(loss_value(spec, 1.0, 0.0) == 0.0);
    CHECK(loss_value(spec, 1.0, -0.25) == 0.5 * 0.25 * 0.25);
  }
}

TEST_CASE("loss value: huber tail from its table form", "[losses]") {
  CHECK(loss_value(LossSpec::hop(1.0), 1.0, 3.0) == Approx(2.5).epsilon(1e-15));
  CHECK(loss_value(LossSpec::huber(), 1.0, 3.0) == Approx(2.5).epsilon(1e-15));
}

TEST_CASE("loss value: hoc tail against its closed form", "[losses]") {
  // gamma = 1, c = 1: l(x) = ln(1 + x^2) + b with b = 1/2 - ln 2.
  const LossSpec spec = LossSpec::hoc(1.0);
  const double b = 0.5 - std::log(2.0);
  CHECK(loss_value(spec, 1.0, 3.0) == Approx(std::log(10.0) + b).epsilon(1e-14));
  // Continuity against the quadratic branch at the knot.
  CHECK(loss_value(spec, 1.0, 1.0 + 1e-9) == Approx(0.5).margin(1e-8));
}

TEST_CASE("loss derivative: examples", "[losses]") {
  for (const LossSpec& spec : all_kinds())
    CHECK(loss_derivative(spec, 1.0, 0.5) == 0.5);
  CHECK(loss_derivative(LossSpec::how(1.0), 1.0, 2.0) ==
        Approx(2.0 * std::exp(-3.0)).epsilon(1e-15));
  CHECK(loss_derivative(LossSpec::hop(1.0), 1.0, -3.0) == Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("weight: one inside, table forms outside", "[losses]") {
  for (const LossSpec& spec : all_kinds()) {
    CHECK(weight(spec, 2.0, 1.5) == 1.0);
    CHECK(weight(spec, 2.0, 0.0) == 1.0);  // removable singularity
  }
  CHECK(weight(LossSpec::how(1.0), 1.0, 2.0) == Approx(std::exp(-3.0)).epsilon(1e-15));
  CHECK(weight(LossSpec::hoc(1.0), 1.0, 3.0) == Approx(0.2).epsilon(1e-15));
}

TEST_CASE("weight agrees with finite differences of the loss", "[losses]") {
  const double h = 1e-6;
  for (const LossSpec& spec : all_kinds()) {
    for (double x : {0.3, 0.9, 1.4, 2.0, 3.7, 9.0}) {
      const double fd =
          (loss_value(spec, 1.0, x + h) - loss_value(spec, 1.0, x - h)) / (2.0 * h);
      CHECK(weight(spec, 1.0, x) == Approx(fd / x).epsilon(1e-5).margin(1e-7));
    }
  }
}

TEST_CASE("weight lies in (0, 1] and decays beyond the knot", "[losses]") {
  for (const LossSpec& spec : all_kinds()) {
    double prev = 1.0;
    for (double x = 1.0; x < 30.0; x += 0.25) {
      const double w = weight(spec, 1.0, x);
      // The how weight underflows to +0 once (c^2 - x^2)/sigma^2 < -745;
      // strict positivity only holds where a double can represent it.
      if (x <= 20.0) CHECK(w > 0.0);
      CHECK(w <= 1.0);
      CHECK(w <= prev + 1e-15);
      prev = w;
    }
  }
}

TEST_CASE("shrink: clamps inside, table values outside", "[losses]") {
  for (const LossSpec& spec : all_kinds()) {
    CHECK(shrink(spec, 1.0, 0.8) == 0.0);
    CHECK(shrink(spec, 1.0, -1.0) == 0.0);
  }
  CHECK(shrink(LossSpec::hop(1.0), 1.0, 3.0) == Approx(2.0).epsilon(1e-15));
  CHECK(shrink(LossSpec::hoc(1.0), 1.0, 3.0) == Approx(2.4).epsilon(1e-15));
  CHECK(shrink(LossSpec::how(1.0), 1.0, 2.0) ==
        Approx(2.0 - 2.0 * std::exp(-3.0)).epsilon(1e-15));
}

TEST_CASE("shrink: grid-search oracle on the Moreau objective", "[losses]") {
  // For a few probe points x, minimizing (y - x)^2/2 + phi(y) over a dense
  // sample of the shrinkage image must land on shrink(x).
  for (const LossSpec& spec : {LossSpec::hoc(1.0), LossSpec::how(1.0), LossSpec::hop(0.5)}) {
    for (double x : {1.5, 3.0, 7.0}) {
      double best_y = 0.0;
      double best_obj = 0.5 * x * x;  // y = 0, phi(0) = 0
      for (double xp = -10.0; xp <= 10.0; xp += 1e-3) {
        const DualPoint d = dual_at_image(spec, 1.0, xp);
        const double obj = 0.5 * (d.y - x) * (d.y - x) + d.phi;
        if (obj < best_obj) {
          best_obj = obj;
          best_y = d.y;
        }
      }
      CHECK(best_y == Approx(shrink(spec, 1.0, x)).margin(5e-3));
      CHECK(best_obj == Approx(loss_value(spec, 1.0, x)).margin(1e-5));
    }
  }
}

TEST_CASE("prox identity shrink(x) = x - l'(x) on a wide grid", "[losses]") {
  for (const LossSpec& spec : all_kinds()) {
    for (double c : {0.1, 1.0, 10.0}) {
      for (int i = 0; i <= 2000; ++i) {
        const double x = -10.0 * c + i * (20.0 * c / 2000.0);
        const double lhs = shrink(spec, c, x);
        const double rhs = x - loss_derivative(spec, c, x);
        REQUIRE(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(x)));
      }
    }
  }
}

TEST_CASE("quadratic-inside invariants are exact", "[losses]") {
  for (const LossSpec& spec : all_kinds()) {
    for (double c : {0.1, 1.0, 10.0}) {
      for (int i = 0; i <= 200; ++i) {
        const double x = -c + i * (2.0 * c / 200.0);
        REQUIRE(loss_value(spec, c, x) == 0.5 * x * x);
        REQUIRE(weight(spec, c, x) == 1.0);
        REQUIRE(shrink(spec, c, x) == 0.0);
      }
    }
  }
}

TEST_CASE("C1 continuity at the knot", "[losses]") {
  const double eps = 1e-8;
  for (const LossSpec& spec : all_kinds()) {
    for (double c : {0.1, 1.0, 10.0}) {
      CHECK(std::abs(loss_value(spec, c, c - eps) - loss_value(spec, c, c + eps)) <
            1e-6);
      CHECK(std::abs(loss_derivative(spec, c, c - eps) -
                     loss_derivative(spec, c, c + eps)) < 1e-6);
    }
  }
}

TEST_CASE("prox optimality among random competitors", "[losses]") {
  Rng rng(20240811);
  for (const LossSpec& spec : all_kinds()) {
    const double c = 1.0;
    for (int i = 0; i < 50; ++i) {
      const double x = (rng.uniform01() - 0.5) * 20.0;
      const DualPoint at = dual_at_image(spec, c, x);
      const double obj_star = 0.5 * (at.y - x) * (at.y - x) + at.phi;
      for (int j = 0; j < 1000; ++j) {
        const double xp = (rng.uniform01() - 0.5) * 20.0;
        const DualPoint d = dual_at_image(spec, c, xp);
        const double obj = 0.5 * (d.y - x) * (d.y - x) + d.phi;
        REQUIRE(obj_star <= obj + 1e-10);
      }
    }
  }
}

TEST_CASE("odd symmetry and even loss", "[losses]") {
  for (const LossSpec& spec : all_kinds()) {
    for (double x = 0.0; x < 12.0; x += 0.37) {
      CHECK(shrink(spec, 1.0, -x) == -shrink(spec, 1.0, x));
      CHECK(loss_value(spec, 1.0, -x) == loss_value(spec, 1.0, x));
    }
  }
}

TEST_CASE("shrink magnitude is monotone and dominated by |x|", "[losses]") {
  for (const LossSpec& spec : all_kinds()) {
    double prev = 0.0;
    for (double x = 0.0; x < 25.0; x += 0.05) {
      const double s = std::abs(shrink(spec, 1.0, x));
      CHECK(s <= std::abs(x));
      CHECK(s >= prev - 1e-12);
      prev = s;
    }
  }
}

TEST_CASE("how loss is bounded by sigma^2/2 + c^2/2", "[losses]") {
  for (double sigma : {0.5, 1.0, 3.0}) {
    const LossSpec spec = LossSpec::how(sigma);
    const double bound = 0.5 * sigma * sigma + 0.5;
    for (double x = 0.0; x < 100.0; x += 0.5)
      CHECK(loss_value(spec, 1.0, x) <= bound + 1e-12);
  }
}

TEST_CASE("hop with p = 1 reduces to huber exactly", "[losses]") {
  const LossSpec hop1 = LossSpec::hop(1.0);
  for (double c : {0.3, 1.0, 4.0}) {
    for (int i = 0; i <= 10000; ++i) {
      const double x = -12.0 * c + i * (24.0 * c / 10000.0);
      REQUIRE(std::abs(loss_value(hop1, c, x) - huber_loss_ref(c, x)) <= 1e-14);
      REQUIRE(std::abs(shrink(hop1, c, x) - huber_prox_ref(c, x)) <= 1e-14);
    }
  }
}

TEST_CASE("dual_at_image: examples and the huber l1 regularizer", "[losses]") {
  for (const LossSpec& spec : all_kinds()) {
    const DualPoint d = dual_at_image(spec, 1.0, 0.5);
    CHECK(d.y == 0.0);
    CHECK(d.phi == 0.0);
  }
  {
    const DualPoint d = dual_at_image(LossSpec::hop(1.0), 1.0, 3.0);
    CHECK(d.y == Approx(2.0).epsilon(1e-15));
    CHECK(d.phi == Approx(2.0).epsilon(1e-15));
  }
  {
    const DualPoint d = dual_at_image(LossSpec::hoc(1.0), 1.0, 3.0);
    CHECK(d.y == Approx(2.4).epsilon(1e-15));
    CHECK(d.phi == Approx(loss_value(LossSpec::hoc(1.0), 1.0, 3.0) - 0.18).epsilon(1e-12));
  }
  // Huber's implicit regularizer is c|y|: check along the image.
  for (double x = 1.0; x < 8.0; x += 0.1) {
    const DualPoint d = dual_at_image(LossSpec::huber(), 1.0, x);
    CHECK(d.phi == Approx(1.0 * std::abs(d.y)).margin(1e-12));
  }
}

namespace {

// Raw generator g and g' for each family, coded independently of the library.
double raw_g(const LossSpec& spec, double c, double t) {
  switch (spec.kind) {
    case LossKind::how: {
      const double s = spec.sigma.value_or(c);
      return 0.5 * s * s * (1.0 - std::exp(-t * t / (s * s)));
    }
    case LossKind::hoc: {
      const double g = spec.gamma.value_or(c);
      return 0.5 * g * g * std::log(1.0 + t * t / (g * g));
    }
    case LossKind::hop:
      return std::pow(t, spec.p);
    case LossKind::huber:
      return t;
  }
  return 0.0;
}

double raw_g_prime(const LossSpec& spec, double c, double t) {
  switch (spec.kind) {
    case LossKind::how: {
      const double s = spec.sigma.value_or(c);
      return t * std::exp(-t * t / (s * s));
    }
    case LossKind::hoc: {
      const double g = spec.gamma.value_or(c);
      return g * g * t / (g * g + t * t);
    }
    case LossKind::hop:
      return spec.p * std::pow(t, spec.p - 1.0);
    case LossKind::huber:
      return 1.0;
  }
  return 0.0;
}

}  // namespace

TEST_CASE("tail coefficients match a = c/g'(c), b = c^2/2 - a g(c)", "[losses]") {
  for (const LossSpec& spec : all_kinds()) {
    for (double c : {0.5, 1.0, 2.0}) {
      const LossCoefficients ab = loss_coefficients(spec, c);
      CHECK(ab.a > 0.0);
      CHECK(std::isfinite(ab.a));
      CHECK(ab.a * raw_g_prime(spec, c, c) == Approx(c).epsilon(1e-12));
      CHECK(ab.a * raw_g(spec, c, c) + ab.b == Approx(0.5 * c * c).margin(1e-12));
      // The simplified tail evaluation must agree with a*g(|x|) + b.
      for (double x : {1.5 * c, 3.0 * c, 8.0 * c}) {
        CHECK(loss_value(spec, c, x) ==
              Approx(ab.a * raw_g(spec, c, x) + ab.b).epsilon(1e-11).margin(1e-13));
      }
    }
  }
}

TEST_CASE("parameter-domain errors", "[losses]") {
  CHECK_THROWS_AS(loss_value(LossSpec::how(-1.0), 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(loss_value(LossSpec::hoc(0.0), 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(loss_value(LossSpec::hop(0.0), 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(loss_value(LossSpec::hop(1.5), 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(loss_value(LossSpec::how(), 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(loss_value(LossSpec::how(), -2.0, 0.5), std::invalid_argument);
  LossSpec misplaced = LossSpec::how(1.0);
  misplaced.kind = LossKind::hoc;
  CHECK_THROWS_AS(loss_value(misplaced, 1.0, 0.5), std::invalid_argument);
}
