#pragma once

// Four-stroke isoenergetic cycle on the two lowest Rabi levels.
//
//   1 -> 2  isoenergetic expansion, ground state at xi1 to excited state at xi2,
//           E0(xi1) = E1(xi2); energy Q_in enters from the energy bath
//   2 -> 3  adiabat in the excited state, xi3 = alpha * xi2
//   3 -> 4  isoenergetic compression, excited state at xi3 to ground state at xi4,
//           E1(xi3) = E0(xi4); energy Q_out leaves
//   4 -> 1  adiabat in the ground state back to xi1
//
// Direction of the first stroke per knob: g increases, omega decreases,
// Omega increases (E1 falls with Omega over the operating window).

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "rabi/errors.hpp"
#include "rabi/spectrum.hpp"

namespace rabi {

enum class Stroke {
    Expansion,    // starts in the ground state
    Compression,  // starts in the excited state
};

/// True when the expansion stroke increases the knob.
bool expansion_increases(Knob knob);

/// Unit in which energies of a study varying `knob` are expressed.
EnergyUnit declared_unit(Knob knob);

struct CycleSpec {
    Knob varied = Knob::Coupling;
    double xi1 = 0.5;
    double alpha = 2.0;  // xi3 / xi2
    ModelParams fixed;   // the component named by `varied` is ignored
    Method method = Method::ExactNumeric;
    TruncationPolicy policy;

    /// alpha >= 1 for g, 0 < alpha <= 1 for omega and Omega (alpha = 1 is
    /// the trivial closed cycle). Approximate levels are refused for Omega.
    void validate() const;
    ModelParams params_at(double xi) const { return fixed.with(varied, xi); }
};

/// The two lowest levels as functions of the varied parameter.
class LevelModel {
public:
    explicit LevelModel(const CycleSpec& spec)
        : knob_(spec.varied), base_(spec.fixed), method_(spec.method), policy_(spec.policy) {}
    LevelModel(Knob knob, const ModelParams& base, Method method, const TruncationPolicy& policy)
        : knob_(knob), base_(base), method_(method), policy_(policy) {}

    /// Throws ConvergenceError when the exact spectrum misses its tolerance.
    LevelPair at(double xi) const;
    LevelSlopes slopes_at(double xi) const;
    double energy(int level, double xi) const;
    double gap(double xi) const { return level_gap(at(xi)); }

    Knob knob() const { return knob_; }
    Method method() const { return method_; }

    /// Exact levels at one fixed cutoff, so that the levels are smooth in xi
    /// over a stroke. No effect for approximate levels.
    LevelModel pinned(int cutoff) const;
    /// Cutoff that converges the exact levels at both xi_a and xi_b, plus one
    /// growth step of margin.
    int stroke_cutoff(double xi_a, double xi_b) const;

private:
    Knob knob_;
    ModelParams base_;
    Method method_;
    TruncationPolicy policy_;
    int pinned_cutoff_ = 0;
};

struct OccupationProfile {
    Stroke stroke = Stroke::Expansion;
    std::vector<double> xi_samples;
    std::vector<double> p0;
    std::vector<double> p1;
    double e_const = 0.0;
};

struct CycleFlags {
    bool dsc_threshold = false;   // varied = g and xi3 > 2 Omega
    bool near_degenerate = false; // some corner has gap below kNearDegenerateGap
};

/// Gap (declared units) below which a corner is flagged as near-degenerate.
inline constexpr double kNearDegenerateGap = 1e-3;

struct CycleResult {
    std::array<double, 4> xi{};
    double q_in = 0.0;     // magnitude absorbed on 1 -> 2
    double q_out = 0.0;    // magnitude released on 3 -> 4
    double w_total = 0.0;  // q_in - q_out
    double eta = 0.0;      // 1 - q_out / q_in
    std::array<double, 2> w_adiabatic{};  // W(2->3), W(4->1)
    std::optional<double> q_in_quadrature;
    std::optional<double> q_out_quadrature;
    std::optional<double> q_in_closed_form;
    std::optional<double> q_out_closed_form;
    CycleFlags flags;
};

enum class Stage { Validation, Expansion, Adiabat, Compression, EnergyExchange };
std::string_view to_string(Stage s);

/// A run_cycle failure: the original error kind plus the stage it came from.
class CycleError : public Error {
public:
    CycleError(Stage stage, const Error& cause);
    Stage stage() const noexcept { return stage_; }

private:
    Stage stage_;
};

/// xi2 with E1(xi2) = E0(xi1), searched on the expansion side of xi1.
double solve_expansion(const CycleSpec& spec);

/// xi4 with E0(xi4) = E1(xi3), searched on the return side of xi3.
double solve_compression(const CycleSpec& spec, double xi3);

/// p0(xi) = (E1(xi) - e) / (E1(xi) - E0(xi)) on a uniform grid over [xi_k, xi_l],
/// with e the energy of the starting level at xi_k.
OccupationProfile occupation_profile(const CycleSpec& spec, double xi_k, double xi_l,
                                     std::size_t n_samples, Stroke stroke);

/// Signed energy exchange over xi_k -> xi_l, positive when energy enters.
/// Uses the log + integral representation with derivative callbacks and
/// adaptive Gauss-Kronrod quadrature; compression swaps the two levels.
double energy_exchange_quadrature(const CycleSpec& spec, double xi_k, double xi_l, Stroke stroke);

bool has_closed_form(Knob knob, Method method);

/// Same quantity from the closed forms for the approximate levels (g and
/// omega only). Throws CapabilityError otherwise.
double energy_exchange_closed_form(const CycleSpec& spec, double xi_k, double xi_l, Stroke stroke);

/// E_level(xi_j) - E_level(xi_i): work on an adiabat entered in a pure state.
double adiabatic_work(const CycleSpec& spec, int level, double xi_i, double xi_j);

CycleResult run_cycle(const CycleSpec& spec);

struct OperatingRange {
    double lo = 0.0;
    double hi = 0.0;
    bool empty() const { return !(hi > lo); }
    bool contains(double x) const { return x > lo && x < hi; }
};

/// xi1 interval on which the starting gap exceeds `gap_floor` and the
/// expansion stroke closes. Omega returns the fixed window (0.5, 6) omega.
OperatingRange range_probe(Knob varied, const ModelParams& fixed, Method method,
                           const TruncationPolicy& policy = {},
                           double gap_floor = kDegeneracyThreshold);

}  // namespace rabi
