#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace rmc {

/// Families of hybrid losses: quadratic for |x| <= c, a robust tail beyond.
///
/// The tail is a * g(|x|) + b where g is the Welsch (how), Cauchy (hoc),
/// l_p (hop) or absolute-value (huber) function, and a = c / g'(c),
/// b = c^2/2 - a*g(c) make the join at |x| = c continuous with a continuous
/// first derivative. Residuals inside [-c, c] are never down-weighted.
enum class LossKind { how, hoc, hop, huber };

/// Which hybrid loss to use plus its shape parameter. The threshold c is not
/// stored here: it changes every solver iteration and is passed per call.
///
/// When sigma (how) or gamma (hoc) is left unset, the scale follows c; the
/// effective scale is re-derived on every evaluation, so it tracks a moving
/// threshold automatically.
struct LossSpec {
  LossKind kind = LossKind::how;
  std::optional<double> sigma;  // Welsch scale, how only
  std::optional<double> gamma;  // Cauchy scale, hoc only
  double p = 1.0;               // tail exponent, hop only, 0 < p <= 1

  static LossSpec how() { return {LossKind::how, std::nullopt, std::nullopt, 1.0}; }
  static LossSpec how(double sigma) { return {LossKind::how, sigma, std::nullopt, 1.0}; }
  static LossSpec hoc() { return {LossKind::hoc, std::nullopt, std::nullopt, 1.0}; }
  static LossSpec hoc(double gamma) { return {LossKind::hoc, std::nullopt, gamma, 1.0}; }
  static LossSpec hop(double p) { return {LossKind::hop, std::nullopt, std::nullopt, p}; }
  static LossSpec huber() { return {LossKind::huber, std::nullopt, std::nullopt, 1.0}; }

  void validate() const {
    if (sigma && (!(*sigma > 0.0) || !std::isfinite(*sigma)))
      throw std::invalid_argument("LossSpec: sigma must be finite and > 0");
    if (gamma && (!(*gamma > 0.0) || !std::isfinite(*gamma)))
      throw std::invalid_argument("LossSpec: gamma must be finite and > 0");
    if (sigma && kind != LossKind::how)
      throw std::invalid_argument("LossSpec: sigma is only valid for the how kind");
    if (gamma && kind != LossKind::hoc)
      throw std::invalid_argument("LossSpec: gamma is only valid for the hoc kind");
    if (kind == LossKind::hop && (!(p > 0.0) || !(p <= 1.0)))
      throw std::invalid_argument("LossSpec: p must lie in (0, 1]");
  }
};

inline const char* loss_kind_name(LossKind k) {
  switch (k) {
    case LossKind::how: return "how";
    case LossKind::hoc: return "hoc";
    case LossKind::hop: return "hop";
    case LossKind::huber: return "huber";
  }
  return "?";
}

/// Continuity constants of the tail for a given (spec, c):
/// a = c / g'(c), b = c^2/2 - a * g(c).
///
/// Exposed for testing the C1 join. Evaluation code does not use them; it
/// works with algebraically simplified a*g'(|x|) forms instead, which avoids
/// computing a = e^{c^2/sigma^2} (how) that overflows for small sigma.
struct LossCoefficients {
  double a = 0.0;
  double b = 0.0;
};

namespace detail {

inline void check_c(double c) {
  if (!(c > 0.0) || std::isnan(c))
    throw std::invalid_argument("loss threshold c must be > 0");
}

inline double eff_sigma(const LossSpec& s, double c) { return s.sigma ? *s.sigma : c; }
inline double eff_gamma(const LossSpec& s, double c) { return s.gamma ? *s.gamma : c; }

/// a * g'(ax) for ax > c, in simplified per-kind form.
inline double tail_pull(const LossSpec& spec, double c, double ax) {
  switch (spec.kind) {
    case LossKind::how: {
      const double s = eff_sigma(spec, c);
      return ax * std::exp((c * c - ax * ax) / (s * s));
    }
    case LossKind::hoc: {
      const double g = eff_gamma(spec, c);
      return (g * g + c * c) * ax / (g * g + ax * ax);
    }
    case LossKind::hop:
      return std::pow(c, 2.0 - spec.p) * std::pow(ax, spec.p - 1.0);
    case LossKind::huber:
      return c;
  }
  return 0.0;
}

/// a * g(ax) + b for ax > c, in simplified per-kind form.
inline double tail_value(const LossSpec& spec, double c, double ax) {
  switch (spec.kind) {
    case LossKind::how: {
      const double s2 = eff_sigma(spec, c);
      const double ss = s2 * s2;
      return 0.5 * ss * (1.0 - std::exp((c * c - ax * ax) / ss)) + 0.5 * c * c;
    }
    case LossKind::hoc: {
      const double g = eff_gamma(spec, c);
      const double gg = g * g;
      const double half_scale = 0.5 * (gg + c * c);
      const double b = 0.5 * c * c - half_scale * std::log1p((c / g) * (c / g));
      return half_scale * std::log1p((ax / g) * (ax / g)) + b;
    }
    case LossKind::hop:
      return (1.0 / spec.p) * std::pow(c, 2.0 - spec.p) * std::pow(ax, spec.p) +
             (0.5 * c * c - c * c / spec.p);
    case LossKind::huber:
      return c * ax - 0.5 * c * c;
  }
  return 0.0;
}

}  // namespace detail

/// Hybrid loss l_{g,c}(x): x^2/2 inside [-c, c], robust tail outside.
inline double loss_value(const LossSpec& spec, double c, double x) {
  spec.validate();
  detail::check_c(c);
  const double ax = std::abs(x);
  if (ax <= c) return 0.5 * x * x;
  return detail::tail_value(spec, c, ax);
}

/// d/dx loss_value. Equals x inside [-c, c]; odd; continuous at |x| = c.
inline double loss_derivative(const LossSpec& spec, double c, double x) {
  spec.validate();
  detail::check_c(c);
  const double ax = std::abs(x);
  if (ax <= c) return x;
  const double t = detail::tail_pull(spec, c, ax);
  return x < 0.0 ? -t : t;
}

/// IRLS weight w(x) = l'(x)/x, with w(0) = 1 by continuity.
/// Exactly 1 on [-c, c]; in (0, 1) and decreasing in |x| beyond.
inline double weight(const LossSpec& spec, double c, double x) {
  spec.validate();
  detail::check_c(c);
  const double ax = std::abs(x);
  if (ax <= c) return 1.0;
  switch (spec.kind) {
    case LossKind::how: {
      const double s = detail::eff_sigma(spec, c);
      return std::exp((c * c - ax * ax) / (s * s));
    }
    case LossKind::hoc: {
      const double g = detail::eff_gamma(spec, c);
      return (g * g + c * c) / (g * g + ax * ax);
    }
    case LossKind::hop:
      return std::pow(c / ax, 2.0 - spec.p);
    case LossKind::huber:
      return c / ax;
  }
  return 1.0;
}

/// Shrinkage map: the minimizer of y -> (y - x)^2/2 + phi_{g,c}(y), where
/// phi is the implicit regularizer dual to the loss. Closed form
/// max{0, |x| - a*g'(|x|)} * sign(x); zero exactly on [-c, c].
inline double shrink(const LossSpec& spec, double c, double x) {
  spec.validate();
  detail::check_c(c);
  const double ax = std::abs(x);
  if (ax <= c) return 0.0;
  double s = ax - detail::tail_pull(spec, c, ax);
  if (s < 0.0) s = 0.0;
  return x < 0.0 ? -s : s;
}

struct DualPoint {
  double y = 0.0;    // shrink(x)
  double phi = 0.0;  // implicit regularizer evaluated at y
};

/// Evaluates the implicit regularizer at the image point y = shrink(x) via
/// phi(y) = l(x) - (x - y)^2/2. phi has no closed form off the image of the
/// shrinkage map; this identity is the only access the toolkit needs.
inline DualPoint dual_at_image(const LossSpec& spec, double c, double x) {
  const double y = shrink(spec, c, x);
  const double d = x - y;
  return {y, loss_value(spec, c, x) - 0.5 * d * d};
}

/// Tail constants from the raw generator g (not the simplified forms); see
/// LossCoefficients for the overflow caveat.
inline LossCoefficients loss_coefficients(const LossSpec& spec, double c) {
  spec.validate();
  detail::check_c(c);
  switch (spec.kind) {
    case LossKind::how: {
      const double s = detail::eff_sigma(spec, c);
      const double ss = s * s;
      const double a = std::exp(c * c / ss);
      const double g_c = 0.5 * ss * (1.0 - std::exp(-c * c / ss));
      return {a, 0.5 * c * c - a * g_c};
    }
    case LossKind::hoc: {
      const double g = detail::eff_gamma(spec, c);
      const double gg = g * g;
      const double a = (gg + c * c) / gg;
      const double g_c = 0.5 * gg * std::log1p((c / g) * (c / g));
      return {a, 0.5 * c * c - a * g_c};
    }
    case LossKind::hop: {
      const double a = std::pow(c, 2.0 - spec.p) / spec.p;
      return {a, 0.5 * c * c - a * std::pow(c, spec.p)};
    }
    case LossKind::huber:
      return {c, -0.5 * c * c};
  }
  return {};
}

}  // namespace rmc
