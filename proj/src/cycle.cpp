#include "rabi/cycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rabi/roots.hpp"

namespace rabi {

namespace {

// Isoenergetic-condition residual accepted after root polishing.
constexpr double kConditionTolerance = 1e-10;
// Absolute tolerance of the energy-exchange quadrature.
constexpr double kQuadratureTolerance = 1e-10;
constexpr std::size_t kMaxQuadraturePanels = 128;
// The integrand is refused within this multiple of the degeneracy threshold.
constexpr double kRefusalFactor = 10.0;

std::string describe(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

bool expansion_increases(Knob knob) {
    return knob != Knob::Resonator;
}

EnergyUnit declared_unit(Knob knob) {
    return knob == Knob::Tls ? EnergyUnit::ResonatorFrequency : EnergyUnit::TlsFrequency;
}

std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::Validation: return "validation";
        case Stage::Expansion: return "expansion";
        case Stage::Adiabat: return "adiabat";
        case Stage::Compression: return "compression";
        case Stage::EnergyExchange: return "energy_exchange";
    }
    return "?";
}

CycleError::CycleError(Stage stage, const Error& cause)
    : Error(cause.kind(), std::string(to_string(stage)) + ": " + cause.what()), stage_(stage) {}

void CycleSpec::validate() const {
    if (!std::isfinite(xi1) || !std::isfinite(alpha)) {
        throw ParameterError("cycle xi1 and alpha must be finite");
    }
    params_at(xi1).validate();
    policy.validate();
    if (varied != Knob::Coupling && !(xi1 > 0.0)) {
        throw ParameterError("xi1 must be > 0 when varying a frequency");
    }
    if (varied == Knob::Coupling) {
        if (!(alpha >= 1.0)) throw ParameterError("alpha must be >= 1 when varying g");
    } else if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ParameterError("alpha must lie in (0, 1] when varying omega or Omega");
    }
    if (varied == Knob::Tls && method == Method::Approximate) {
        throw CapabilityError("approximate levels are not used when varying Omega");
    }
}

LevelPair LevelModel::at(double xi) const {
    const ModelParams p = base_.with(knob_, xi);
    if (pinned_cutoff_ > 0 && method_ == Method::ExactNumeric) {
        p.validate();
        return exact_levels_at_cutoff(p, pinned_cutoff_);
    }
    LevelPair lp = levels(p, method_, policy_);
    if (!lp.converged) {
        throw ConvergenceError("spectrum not converged at " + std::string(to_string(knob_)) + " = " +
                               describe(xi) + " (hard cap " + std::to_string(policy_.hard_cap) + ")");
    }
    return lp;
}

LevelSlopes LevelModel::slopes_at(double xi) const {
    if (pinned_cutoff_ > 0 && method_ == Method::ExactNumeric) {
        return level_slopes_at_cutoff(base_.with(knob_, xi), knob_, pinned_cutoff_);
    }
    return level_slopes(base_.with(knob_, xi), knob_, method_, policy_);
}

LevelModel LevelModel::pinned(int cutoff) const {
    LevelModel m = *this;
    m.pinned_cutoff_ = cutoff;
    return m;
}

int LevelModel::stroke_cutoff(double xi_a, double xi_b) const {
    const int n = std::max(at(xi_a).n_used, at(xi_b).n_used);
    return std::min(n + policy_.growth_step, policy_.hard_cap);
}

double LevelModel::energy(int level, double xi) const {
    const LevelPair lp = at(xi);
    return level == 0 ? lp.e0 : lp.e1;
}

namespace {

// Solves E_target(xi) = energy on one side of `start`. The walk stops at the
// first point whose gap falls to the degeneracy threshold.
double solve_condition(const LevelModel& model, double start, int target, double energy,
                       bool upward, double scale) {
    auto f = [&](double x) { return model.energy(target, x) - energy; };
    auto degenerate = [&](double x) { return model.gap(x) <= kDegeneracyThreshold; };
    auto edge = [&](double usable, double unusable) {
        return roots::bisect_edge([&](double x) { return !degenerate(x); }, usable, unusable);
    };
    const double f_start = f(start);
    const auto bracket =
        roots::expand_bracket(f, start, f_start, upward, 0.5 * scale, degenerate, edge);
    if (!bracket) {
        throw RangeError("no isoenergetic partner of " + std::string(to_string(model.knob())) +
                         " = " + describe(start) + " inside the non-degenerate range");
    }
    const double root = roots::polish(f, *bracket);
    if (std::abs(f(root)) >= kConditionTolerance) {
        throw ConvergenceError("isoenergetic condition residual above tolerance at " + describe(root));
    }
    return root;
}

double knob_scale(const CycleSpec& spec) {
    // Natural energy scale for the first upward step from xi = 0.
    return spec.varied == Knob::Coupling ? spec.fixed.omega : spec.fixed.get(Knob::Resonator);
}

void require_gap(const LevelModel& model, double xi, const char* what) {
    if (model.gap(xi) <= kDegeneracyThreshold) {
        throw DegeneracyError(std::string(what) + " point " + describe(xi) + " is degenerate");
    }
}

}  // namespace

double solve_expansion(const CycleSpec& spec) {
    spec.validate();
    const LevelModel model(spec);
    require_gap(model, spec.xi1, "expansion start");
    const double e_start = model.energy(0, spec.xi1);
    return solve_condition(model, spec.xi1, 1, e_start, expansion_increases(spec.varied),
                           knob_scale(spec));
}

double solve_compression(const CycleSpec& spec, double xi3) {
    spec.validate();
    if (!std::isfinite(xi3) || xi3 < 0.0 || (spec.varied != Knob::Coupling && xi3 == 0.0)) {
        throw ParameterError("xi3 out of the parameter domain");
    }
    const LevelModel model(spec);
    require_gap(model, xi3, "compression start");
    const double e_start = model.energy(1, xi3);
    return solve_condition(model, xi3, 0, e_start, !expansion_increases(spec.varied),
                           knob_scale(spec));
}

OccupationProfile occupation_profile(const CycleSpec& spec, double xi_k, double xi_l,
                                     std::size_t n_samples, Stroke stroke) {
    if (n_samples < 2) throw ParameterError("occupation profile needs at least two samples");
    const LevelModel model(spec);
    OccupationProfile prof;
    prof.stroke = stroke;
    prof.e_const = model.energy(stroke == Stroke::Expansion ? 0 : 1, xi_k);
    prof.xi_samples.reserve(n_samples);
    prof.p0.reserve(n_samples);
    prof.p1.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n_samples - 1);
        const double xi = (i + 1 == n_samples) ? xi_l : xi_k + t * (xi_l - xi_k);
        const LevelPair lp = model.at(xi);
        const double gap = level_gap(lp);
        if (gap <= kDegeneracyThreshold) {
            throw DegeneracyError("occupation profile crosses a degeneracy at " + describe(xi));
        }
        const double p0 = (lp.e1 - prof.e_const) / gap;
        prof.xi_samples.push_back(xi);
        prof.p0.push_back(p0);
        prof.p1.push_back(1.0 - p0);
    }
    return prof;
}

namespace {

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk_panel(F& f, double a, double b) {
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err);
    // With max_depth = 0 the reported error refers to the panel mapped onto
    // [-1, 1]; scale it back to [a, b].
    return {a, b, v, err * 0.5 * std::abs(b - a)};
}

// Globally adaptive Gauss-Kronrod: split the panel with the largest error
// estimate until the summed estimate meets the absolute tolerance.
template <class F>
double adaptive_integrate(F& f, double a, double b) {
    if (a == b) return 0.0;
    std::priority_queue<Panel> panels;
    panels.push(gk_panel(f, a, b));
    double total_err = panels.top().error;
    while (total_err > kQuadratureTolerance) {
        if (panels.size() >= kMaxQuadraturePanels) {
            double estimate = 0.0;
            for (auto q = panels; !q.empty(); q.pop()) estimate += q.top().value;
            throw IntegrationError("energy-exchange quadrature did not converge", estimate, total_err);
        }
        const Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = gk_panel(f, worst.a, mid);
        const Panel right = gk_panel(f, mid, worst.b);
        panels.push(left);
        panels.push(right);
        total_err += left.error + right.error - worst.error;
        // Recompute to avoid drift from repeated subtraction.
        if (panels.size() % 32 == 0) {
            total_err = 0.0;
            for (auto q = panels; !q.empty(); q.pop()) total_err += q.top().error;
        }
    }
    // Sum in a fixed (left-to-right) order for reproducibility.
    std::vector<Panel> done;
    for (; !panels.empty(); panels.pop()) done.push_back(panels.top());
    std::sort(done.begin(), done.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    double sum = 0.0;
    for (const Panel& p : done) sum += p.value;
    return sum;
}

}  // namespace

double energy_exchange_quadrature(const CycleSpec& spec, double xi_k, double xi_l, Stroke stroke) {
    if (xi_k == xi_l) return 0.0;
    LevelModel model(spec);
    if (spec.method == Method::ExactNumeric) model = model.pinned(model.stroke_cutoff(xi_k, xi_l));
    const bool swap = stroke == Stroke::Compression;
    const double refuse_below = kRefusalFactor * kDegeneracyThreshold;

    // (A, B) = (E0, E1) for expansion and (E1, E0) for compression.
    auto ordered = [swap](const LevelPair& lp) {
        return swap ? std::pair{lp.e1, lp.e0} : std::pair{lp.e0, lp.e1};
    };
    const LevelPair at_k = model.at(xi_k);
    const LevelPair at_l = model.at(xi_l);
    if (level_gap(at_k) <= refuse_below || level_gap(at_l) <= refuse_below) {
        throw DegeneracyError("energy exchange endpoint too close to a degeneracy");
    }
    const auto [a_k, b_k] = ordered(at_k);
    const auto [a_l, b_l] = ordered(at_l);
    const double log_term = a_k * std::log(std::abs((a_l - b_l) / (a_k - b_k)));

    auto integrand = [&](double xi) {
        const LevelSlopes s = model.slopes_at(xi);
        if (level_gap(s.levels) <= refuse_below) {
            throw DegeneracyError("energy exchange integrand singular at " + describe(xi));
        }
        const auto [a, b] = ordered(s.levels);
        const double da = swap ? s.d1 : s.d0;
        const double db = swap ? s.d0 : s.d1;
        return (a * db - b * da) / (a - b);
    };
    const double integral = adaptive_integrate(integrand, xi_k, xi_l);
    // log + integral equals -sum_n E_n dp_n; flip so energy entering is positive.
    return -(log_term + integral);
}

bool has_closed_form(Knob knob, Method method) {
    return method == Method::Approximate && knob != Knob::Tls;
}

double energy_exchange_closed_form(const CycleSpec& spec, double xi_k, double xi_l, Stroke stroke) {
    if (!has_closed_form(spec.varied, spec.method)) {
        throw CapabilityError("closed-form energy exchange exists only for approximate levels "
                              "varying g or omega");
    }
    const ModelParams& p = spec.fixed;
    double measured_out = 0.0;  // the closed forms measure energy leaving the system
    if (spec.varied == Knob::Coupling) {
        const double w = p.omega;
        const double big = p.big_omega;
        const double xk = xi_k * xi_k;
        const double xl = xi_l * xi_l;
        const double decay_k = std::exp(-2.0 * xk / (w * w));
        if (stroke == Stroke::Expansion) {
            measured_out = (2.0 / (w * w)) * (xl - xk) * (xk / w + 0.5 * big * decay_k) -
                           (1.0 / (w * w * w)) * (w * w * (xl - xk) + (xl * xl - xk * xk));
        } else {
            measured_out = (2.0 / (w * w)) * (xk - xl) * (-xk / w + 0.5 * big * decay_k) +
                           (1.0 / (w * w * w)) * (w * w * (xk - xl) + (xk * xk - xl * xl));
        }
    } else {
        const double g2 = p.g * p.g;
        const double g4 = g2 * g2;
        const double uk = 1.0 / xi_k;
        const double ul = 1.0 / xi_l;
        const LevelPair at_k = approx_levels(spec.params_at(xi_k));
        if (stroke == Stroke::Expansion) {
            measured_out = -2.0 * g2 * (ul * ul - uk * uk) * at_k.e0 -
                           (4.0 / 3.0) * g4 * (ul * ul * ul - uk * uk * uk) - g2 * (ul - uk);
        } else {
            measured_out = 2.0 * g2 * (uk * uk - ul * ul) * at_k.e1 +
                           (4.0 / 3.0) * g4 * (uk * uk * uk - ul * ul * ul) + g2 * (uk - ul);
        }
    }
    return -measured_out;
}

double adiabatic_work(const CycleSpec& spec, int level, double xi_i, double xi_j) {
    if (level != 0 && level != 1) throw ParameterError("level must be 0 or 1");
    if (xi_i == xi_j) return 0.0;
    const LevelModel model(spec);
    return model.energy(level, xi_j) - model.energy(level, xi_i);
}

namespace {

template <class Fn>
auto staged(Stage stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const CycleError&) {
        throw;
    } catch (const Error& e) {
        throw CycleError(stage, e);
    }
}

}  // namespace

CycleResult run_cycle(const CycleSpec& spec) {
    staged(Stage::Validation, [&] { spec.validate(); return 0; });
    const LevelModel model(spec);
    CycleResult r;
    r.xi[0] = spec.xi1;
    r.xi[1] = staged(Stage::Expansion, [&] { return solve_expansion(spec); });
    r.xi[2] = staged(Stage::Adiabat, [&] {
        const double xi3 = spec.alpha * r.xi[1];
        spec.params_at(xi3).validate();
        return xi3;
    });
    r.xi[3] = staged(Stage::Compression, [&] { return solve_compression(spec, r.xi[2]); });

    staged(Stage::EnergyExchange, [&] {
        const double in_q = energy_exchange_quadrature(spec, r.xi[0], r.xi[1], Stroke::Expansion);
        const double out_q = -energy_exchange_quadrature(spec, r.xi[2], r.xi[3], Stroke::Compression);
        r.q_in_quadrature = in_q;
        r.q_out_quadrature = out_q;
        if (has_closed_form(spec.varied, spec.method)) {
            r.q_in_closed_form = energy_exchange_closed_form(spec, r.xi[0], r.xi[1], Stroke::Expansion);
            r.q_out_closed_form =
                -energy_exchange_closed_form(spec, r.xi[2], r.xi[3], Stroke::Compression);
            r.q_in = *r.q_in_closed_form;
            r.q_out = *r.q_out_closed_form;
        } else {
            r.q_in = in_q;
            r.q_out = out_q;
        }
        return 0;
    });

    r.w_adiabatic = {adiabatic_work(spec, 1, r.xi[1], r.xi[2]), adiabatic_work(spec, 0, r.xi[3], r.xi[0])};
    r.w_total = r.q_in - r.q_out;
    r.eta = r.q_in > 0.0 ? 1.0 - r.q_out / r.q_in : 0.0;

    r.flags.dsc_threshold = spec.varied == Knob::Coupling && r.xi[2] > 2.0 * spec.fixed.big_omega;
    double min_gap = std::numeric_limits<double>::infinity();
    for (double xi : r.xi) min_gap = std::min(min_gap, model.gap(xi));
    r.flags.near_degenerate = min_gap < kNearDegenerateGap;
    return r;
}

OperatingRange range_probe(Knob varied, const ModelParams& fixed, Method method,
                           const TruncationPolicy& policy, double gap_floor) {
    if (varied == Knob::Tls) {
        return {0.5 * fixed.omega, 6.0 * fixed.omega};
    }
    const LevelModel model(varied, fixed, method, policy);
    auto open = [&](double x) { return model.gap(x) > gap_floor; };
    auto expands = [&](double x) {
        CycleSpec spec;
        spec.varied = varied;
        spec.xi1 = x;
        spec.alpha = 1.0;
        spec.fixed = fixed;
        spec.method = method;
        spec.policy = policy;
        try {
            solve_expansion(spec);
            return true;
        } catch (const RangeError&) {
            return false;
        } catch (const DegeneracyError&) {
            return false;
        }
    };

    if (varied == Knob::Coupling) {
        // The gap closes as g grows; the interval is [0, edge).
        if (!open(0.0)) return {0.0, 0.0};
        double good = 0.0;
        double bad = 0.5 * fixed.omega;
        for (int i = 0; i < 80 && open(bad); ++i) {
            good = bad;
            bad *= 1.5;
        }
        double hi = roots::bisect_edge(open, good, bad);
        if (!expands(hi)) hi = roots::bisect_edge(expands, 0.0, hi);
        return {0.0, hi};
    }

    // Resonator: the gap closes as omega shrinks; the interval is (edge, inf).
    const double inf = std::numeric_limits<double>::infinity();
    double good = std::max(fixed.g, fixed.big_omega);
    if (!(good > 0.0)) good = 1.0;
    for (int i = 0; i < 80 && !open(good); ++i) good *= 1.5;
    if (!open(good)) return {inf, inf};
    double bad = good / 1.5;
    for (int i = 0; i < 200 && open(bad); ++i) {
        good = bad;
        bad /= 1.5;
    }
    double lo = roots::bisect_edge(open, good, bad);
    if (!expands(lo)) {
        // Expansion moves omega down, so failures sit below the edge of success.
        double ok = lo;
        for (int i = 0; i < 80 && !expands(ok); ++i) ok *= 1.5;
        lo = roots::bisect_edge(expands, ok, lo);
    }
    return {lo, inf};
}

}  // namespace rabi
