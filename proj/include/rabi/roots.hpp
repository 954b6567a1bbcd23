#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace rabi::roots {

struct Bracket {
    double lo = 0.0;  // the end the search started from
    double hi = 0.0;
    double f_lo = 0.0;
    double f_hi = 0.0;
};

/// Geometric stepping away from `start` until `f` changes sign.
///
/// Upward steps multiply by `factor` (or jump to `first_step` when start == 0);
/// downward steps divide by `factor`, so positive arguments stay positive.
/// `stop(x)` lets the caller end the walk at a point that is outside the usable
/// domain; in that case `boundary(prev, x)` must return the last usable point
/// between them and the bracket is closed there if the sign changed, otherwise
/// std::nullopt is returned.
template <class F, class Stop, class Boundary>
std::optional<Bracket> expand_bracket(F&& f, double start, double f_start, bool upward,
                                      double first_step, Stop&& stop, Boundary&& boundary,
                                      double factor = 1.5, int max_steps = 80) {
    double prev = start;
    double f_prev = f_start;
    for (int i = 0; i < max_steps; ++i) {
        double next = upward ? (prev == 0.0 ? first_step : prev * factor) : prev / factor;
        if (stop(next)) {
            const double edge = boundary(prev, next);
            const double f_edge = f(edge);
            if ((f_edge > 0.0) != (f_start > 0.0)) return Bracket{prev, edge, f_prev, f_edge};
            return std::nullopt;
        }
        const double f_next = f(next);
        if (f_next == 0.0 || (f_next > 0.0) != (f_start > 0.0)) {
            return Bracket{prev, next, f_prev, f_next};
        }
        prev = next;
        f_prev = f_next;
    }
    return std::nullopt;
}

/// Narrows a sign-change bracket to (near) machine precision with TOMS 748,
/// a bracketing method that falls back to bisection steps.
template <class F>
double polish(F&& f, const Bracket& b, std::uintmax_t max_iter = 200) {
    if (b.f_lo == 0.0) return b.lo;
    if (b.f_hi == 0.0) return b.hi;
    double a = std::min(b.lo, b.hi);
    double c = std::max(b.lo, b.hi);
    double fa = (a == b.lo) ? b.f_lo : b.f_hi;
    double fc = (a == b.lo) ? b.f_hi : b.f_lo;
    boost::math::tools::eps_tolerance<double> tol(50);
    const auto r = boost::math::tools::toms748_solve(f, a, c, fa, fc, tol, max_iter);
    return 0.5 * (r.first + r.second);
}

/// Plain bisection for the point where a monotone predicate flips from
/// `true` (at `good`) to `false` (at `bad`).
template <class Pred>
double bisect_edge(Pred&& pred, double good, double bad, int iterations = 60) {
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (good + bad);
        if (mid == good || mid == bad) break;
        if (pred(mid)) good = mid;
        else bad = mid;
    }
    return good;
}

}  // namespace rabi::roots
