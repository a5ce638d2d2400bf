#pragma once

// Analytic continuation of the solution space by recentred Taylor steps.

#include <fstream>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "periodlab/pf_core.hpp"
#include "periodlab/recognition.hpp"

namespace periodlab {

struct PathPlan {
  std::vector<Complex> waypoints;
  Real clearance;
  std::optional<Complex> around;  // centre of an encircled singularity

  std::size_t segment_count() const { return waypoints.empty() ? 0 : waypoints.size() - 1; }
  const Complex& start() const { return waypoints.front(); }
  const Complex& end() const { return waypoints.back(); }
};

/// Distance from p to the closed segment [a, b].
inline Real distance_to_segment(const Complex& p, const Complex& a, const Complex& b) {
  Complex d = b - a;
  Real len2 = norm(d);
  if (len2 == 0) return abs(p - a);
  Complex ap = p - a;
  Real t = (ap.re * d.re + ap.im * d.im) / len2;
  if (t < 0) t = 0;
  if (t > 1) t = 1;
  return abs(p - (a + d * t));
}

inline Real segment_clearance(const Complex& a, const Complex& b, std::span<const Complex> singular) {
  Real m(-1);
  for (const auto& s : singular) {
    Real d = distance_to_segment(s, a, b);
    if (m < 0 || d < m) m = d;
  }
  return m;
}

/// Smallest distance from any segment of `plan` to `singular`, ignoring `skip`.
inline Real path_clearance(const std::vector<Complex>& pts, std::span<const Complex> singular,
                           const std::optional<Complex>& skip = std::nullopt) {
  Real m(-1);
  for (const auto& s : singular) {
    if (skip && abs(s - *skip) == 0) continue;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      Real d = distance_to_segment(s, pts[i], pts[i + 1]);
      if (m < 0 || d < m) m = d;
    }
  }
  return m;
}

namespace detail {

inline void route(const Complex& a, const Complex& b, std::span<const Complex> singular, const Real& delta,
                  std::vector<Complex>& out, int depth) {
  const Complex* worst = nullptr;
  Real best_t(0);
  Complex d = b - a;
  Real len2 = norm(d);
  for (const auto& s : singular) {
    if (distance_to_segment(s, a, b) >= delta) continue;
    Complex as = s - a;
    Real t = (as.re * d.re + as.im * d.im) / len2;
    if (worst == nullptr || t < best_t) {
      worst = &s;
      best_t = t;
    }
  }
  if (worst == nullptr) {
    out.push_back(b);
    return;
  }
  if (depth > 24) throw Error(ErrorKind::clearance, "could not find a detour with the requested clearance");
  // Perpendicular offset, always on the upper side of the segment direction.
  Complex n = Complex::i() * d / boost::multiprecision::sqrt(len2);
  if (n.im < 0 || (n.im == 0 && n.re < 0)) n = -n;
  Real h = 2 * delta;
  for (int tries = 0;; ++tries) {
    Complex w = *worst + n * h;
    bool ok = true;
    for (const auto& s : singular)
      if (abs(w - s) < delta) ok = false;
    if (ok && distance_to_segment(*worst, a, w) >= delta && distance_to_segment(*worst, w, b) >= delta) {
      route(a, w, singular, delta, out, depth + 1);
      route(w, b, singular, delta, out, depth + 1);
      return;
    }
    if (tries > 40) throw Error(ErrorKind::clearance, "could not find a detour with the requested clearance");
    h *= 2;
  }
}

}  // namespace detail

/// Straight segment when it keeps distance delta from every singular point,
/// otherwise a polyline through perpendicular offsets above the obstacles.
inline PathPlan plan_path(const Complex& from, const Complex& to, std::span<const Complex> singular, const Real& delta) {
  if (!(delta > 0)) throw Error(ErrorKind::usage, "clearance must be positive");
  for (const auto& s : singular) {
    if (abs(from - s) < delta || abs(to - s) < delta)
      throw Error(ErrorKind::clearance, "path endpoint lies within the clearance of a singular point");
  }
  PathPlan plan;
  plan.clearance = delta;
  plan.waypoints.push_back(from);
  if (abs(to - from) == 0) return plan;
  detail::route(from, to, singular, delta, plan.waypoints, 0);
  return plan;
}

/// Reads `re im` decimal pairs, one per line; `#` starts a comment.
inline PathPlan read_path(std::istream& in) {
  PathPlan plan;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = detail::strip_comment(raw);
    std::istringstream ls(line);
    std::string re, im;
    if (!(ls >> re)) continue;
    if (!(ls >> im)) throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": expected `re im`");
    std::string extra;
    if (ls >> extra) throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": trailing text");
    Complex z(Real(parse_rational(re)), Real(parse_rational(im)));
    if (!plan.waypoints.empty() && abs(z - plan.waypoints.back()) == 0)
      throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": repeated waypoint");
    plan.waypoints.push_back(z);
  }
  if (plan.waypoints.empty()) throw Error(ErrorKind::parse, "path file has no waypoints");
  return plan;
}

inline PathPlan read_path_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::parse, "cannot open path file " + file);
  return read_path(in);
}

// ---------------------------------------------------------------------------
// Local stepping.

/// Finite singular points of the d/dphi form as complex numbers.
inline Real distance_to_singular(const Complex& z, std::span<const Complex> singular) {
  Real m(-1);
  for (const auto& s : singular) {
    Real d = abs(z - s);
    if (m < 0 || d < m) m = d;
  }
  return m;
}

/// Clearance 1/100, reduced to half the endpoint distance when an endpoint is
/// closer than that to a singular point.
inline Real default_clearance(const Complex& from, const Complex& to, std::span<const Complex> singular) {
  Real d = to_real(Rational(1, 100));
  for (const auto& z : {from, to}) {
    const Real m = distance_to_singular(z, singular);
    if (m >= 0 && m / 2 < d) d = m / 2;
  }
  return d;
}

/// Continues every row of `state` from state.at to `target` with one Taylor
/// expansion of the ODE around state.at.
inline StateMatrix taylor_step(const DOperator& dop, std::span<const Complex> singular, const StateMatrix& state,
                               const Complex& target) {
  const int wp = working_digits(state.precision);
  PrecisionScope scope(wp);
  const Complex& x0 = state.at.value;
  Complex h = target - x0;
  if (is_zero(h)) return state;

  const Real dist = distance_to_singular(x0, singular);
  if (dist >= 0 && abs(h) > dist / 2 * (1 + pow10(-10)))
    throw Error(ErrorKind::step_size, "Taylor step exceeds half the distance to the nearest singular point");

  std::array<std::vector<Complex>, 5> q;
  for (int j = 0; j <= kOperatorOrder; ++j) q[j] = taylor_shift(dop.p[j], x0);
  const Complex lead = q[4].empty() ? Complex(0) : q[4][0];
  if (norm(lead) < pow10(-2 * wp + 10))
    throw Error(ErrorKind::singular_step, "leading coefficient vanishes at the expansion point");
  const Complex inv_lead = Complex(1) / lead;

  auto falling = [](long n, int j) {
    long r = 1;
    for (int i = 0; i < j; ++i) r *= (n - i);
    return r;
  };

  const Real habs = abs(h);
  const Real eps = pow10(-wp);
  StateMatrix out;
  out.precision = state.precision;
  out.at.value = target;
  out.at.log_value = state.at.log_value + log(target / x0);

  for (int row = 0; row < 4; ++row) {
    std::vector<Complex> c(4);
    const std::array<long, 4> fact = {1, 1, 2, 6};
    Real scale(0);
    for (int m = 0; m < 4; ++m) {
      c[m] = state.w[row][m] / Real(fact[m]);
      scale = boost::multiprecision::max(scale, abs(state.w[row][m]));
    }
    if (scale == 0) scale = 1;
    // Accumulate value and derivatives while generating coefficients.
    std::array<Complex, 4> acc;
    std::vector<Complex> hp;  // h^n
    hp.push_back(Complex(1));
    auto add_term = [&](long n) {
      while (static_cast<long>(hp.size()) <= n) hp.push_back(hp.back() * h);
      for (int m = 0; m < 4 && m <= n; ++m) acc[m] += c[n] * hp[n - m] * Real(falling(n, m));
    };
    for (long n = 0; n < 4; ++n) add_term(n);
    int quiet = 0;
    Real hn = boost::multiprecision::pow(habs, 4);
    const Real hmin3 = boost::multiprecision::pow(boost::multiprecision::min(habs, Real(1)), 3);
    for (long N = 0;; ++N) {
      // Coefficient of h^N in sum_j q_j(h) y^{(j)}(h) determines c[N+4].
      Complex s(0);
      for (int j = 0; j <= kOperatorOrder; ++j) {
        const auto& qj = q[j];
        for (long l = 0; l < static_cast<long>(qj.size()) && l <= N; ++l) {
          if (j == 4 && l == 0) continue;
          const long idx = N - l + j;
          if (idx < j) continue;
          s += qj[l] * c[idx] * Real(falling(idx, j));
        }
      }
      const long n = N + 4;
      Complex cn = -(s * inv_lead) / Real(falling(n, 4));
      c.push_back(cn);
      add_term(n);
      Real size = abs(cn) * hn * Real(n * n * n) / hmin3;
      hn *= habs;
      if (size <= eps * scale) {
        if (++quiet >= 6) break;
      } else {
        quiet = 0;
      }
      if (n > 20000) throw Error(ErrorKind::convergence, "Taylor series did not converge within 20000 terms");
    }
    for (int m = 0; m < 4; ++m) out.w[row][m] = acc[m];
  }
  return out;
}

struct TransportTrace {
  StateMatrix state;
  std::vector<Complex> nodes;
  Real min_abs_det;
  int steps = 0;
};

/// Chains Taylor steps along the polyline `pts`, sub-stepping so that each
/// step is at most half the distance to the nearest singular point.
inline TransportTrace transport_state(const DOperator& dop, std::span<const Complex> singular, StateMatrix state,
                                      const std::vector<Complex>& pts) {
  PrecisionScope scope(working_digits(state.precision));
  TransportTrace tr;
  tr.nodes.push_back(state.at.value);
  tr.min_abs_det = abs(det(state.w));
  if (!pts.empty() && abs(pts.front() - state.at.value) > pow10(-working_digits(state.precision) + 5))
    throw Error(ErrorKind::usage, "path does not start at the state point");
  for (std::size_t seg = 1; seg < pts.size(); ++seg) {
    const Complex b = pts[seg];
    while (!is_zero(b - state.at.value)) {
      const Complex& x = state.at.value;
      Real dist = distance_to_singular(x, singular);
      if (dist >= 0 && dist < pow10(-10)) throw Error(ErrorKind::singular_step, "path runs into a singular point");
      Real remaining = abs(b - x);
      Real max_step = dist < 0 ? remaining : dist * Real(0.49);
      Complex target = remaining <= max_step ? b : x + (b - x) * (max_step / remaining);
      state = taylor_step(dop, singular, state, target);
      ++tr.steps;
      if (tr.steps > 100000) throw Error(ErrorKind::convergence, "too many continuation steps");
      tr.nodes.push_back(state.at.value);
      Real d = abs(det(state.w));
      if (d < tr.min_abs_det) tr.min_abs_det = d;
    }
  }
  tr.state = std::move(state);
  return tr;
}

/// Seeds with the canonical basis at the first waypoint and transports along
/// the path to its last waypoint.
inline TransportTrace transport_traced(const Operator& op, const PathPlan& path, int prec,
                                       std::optional<Complex> start_log = std::nullopt) {
  if (path.waypoints.empty()) throw Error(ErrorKind::usage, "empty path");
  PrecisionScope scope(working_digits(prec));
  BranchedPoint start = BranchedPoint::principal(path.start());
  if (start_log) start.log_value = *start_log;
  CanonicalBasis basis = frobenius_for(op, start, prec);
  StateMatrix seed = eval_canonical(basis, start, prec);
  const auto singular = finite_singular_values(op, working_digits(prec));
  return transport_state(theta_to_d(op), singular, seed, path.waypoints);
}

inline StateMatrix transport(const Operator& op, const CanonicalBasis& basis, const PathPlan& path, int prec) {
  if (path.waypoints.empty()) throw Error(ErrorKind::usage, "empty path");
  PrecisionScope scope(working_digits(prec));
  StateMatrix seed = eval_canonical(basis, BranchedPoint::principal(path.start()), prec);
  const auto singular = finite_singular_values(op, working_digits(prec));
  return transport_state(theta_to_d(op), singular, seed, path.waypoints).state;
}

// ---------------------------------------------------------------------------
// Monodromy.

struct Monodromy {
  Mat4<Complex> numeric;
  std::optional<Mat4<Rational>> exact;
  Real residual;  // max |numeric - exact| when exact is set
  PathPlan loop;
};

/// Counterclockwise closed loop starting and ending at `base` that encircles
/// `center` once and no other singular point. When base is close to center the
/// loop is a circle through base; otherwise it travels in along the ray to a
/// small circle and back (a lasso).
inline PathPlan loop_around(const Complex& base, const Complex& center, std::span<const Complex> singular,
                            int segments = 64) {
  Real other(-1);
  for (const auto& s : singular) {
    if (abs(s - center) == 0) continue;
    Real d = abs(s - center);
    if (other < 0 || d < other) other = d;
  }
  const Real rb = abs(base - center);
  if (rb == 0) throw Error(ErrorKind::clearance, "base point coincides with the loop centre");
  PathPlan plan;
  plan.around = center;
  const auto& pi = constants(static_cast<int>(Real::default_precision())).pi;
  auto circle = [&](const Complex& p, std::vector<Complex>& pts) {
    for (int k = 1; k <= segments; ++k) {
      Real a = 2 * pi * k / segments;
      Complex rot(boost::multiprecision::cos(a), boost::multiprecision::sin(a));
      pts.push_back(k == segments ? p : center + (p - center) * rot);
    }
  };
  if (other < 0 || rb <= other / 2) {
    plan.waypoints.push_back(base);
    circle(base, plan.waypoints);
    plan.clearance = other < 0 ? rb / 2 : boost::multiprecision::min(rb / 2, other - rb);
    return plan;
  }
  const Real r = other / 2;
  const Complex p = center + (base - center) * (r / rb);
  std::vector<Complex> others;
  for (const auto& s : singular)
    if (abs(s - center) != 0) others.push_back(s);
  PathPlan in = plan_path(base, p, others, r / 2);
  if (path_clearance(in.waypoints, std::span<const Complex>(&center, 1)) < r / 2)
    throw Error(ErrorKind::clearance, "approach to the loop centre passes too close to it");
  plan.waypoints = in.waypoints;
  circle(p, plan.waypoints);
  for (auto it = in.waypoints.rbegin() + 1; it != in.waypoints.rend(); ++it) plan.waypoints.push_back(*it);
  plan.clearance = r / 2;
  return plan;
}

inline void rationalize(Monodromy& m, int prec) {
  const Real tol = default_tolerance(prec);
  Mat4<Rational> q;
  Real res(0);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      auto r = recognize_rational(m.numeric[i][j], default_max_height(), tol);
      if (!r) return;
      q[i][j] = r->value();
      res = boost::multiprecision::max(res, r->residual);
    }
  }
  m.exact = q;
  m.residual = res;
}

/// M with W_end = M W_start for the transport of the canonical state at the
/// first waypoint of `loop` around the closed polyline.
inline Monodromy monodromy_along(const Operator& op, const PathPlan& loop, int prec) {
  if (loop.waypoints.size() < 2 || abs(loop.start() - loop.end()) != 0)
    throw Error(ErrorKind::usage, "monodromy loop must be closed");
  PrecisionScope scope(working_digits(prec));
  BranchedPoint start = BranchedPoint::principal(loop.start());
  CanonicalBasis basis = frobenius_for(op, start, prec);
  StateMatrix seed = eval_canonical(basis, start, prec);
  const auto singular = finite_singular_values(op, working_digits(prec));
  TransportTrace tr = transport_state(theta_to_d(op), singular, seed, loop.waypoints);
  Monodromy m;
  m.numeric = tr.state.w * inverse(seed.w);
  m.loop = loop;
  rationalize(m, prec);
  return m;
}

inline Monodromy monodromy(const Operator& op, const Complex& base, const Complex& center, int prec) {
  PrecisionScope scope(working_digits(prec));
  const auto singular = finite_singular_values(op, working_digits(prec));
  return monodromy_along(op, loop_around(base, center, singular), prec);
}

}  // namespace periodlab
