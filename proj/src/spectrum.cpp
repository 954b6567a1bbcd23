#include "rabi/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <lapacke.h>

namespace rabi {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Parameter: return "parameter";
        case ErrorKind::Sizing: return "sizing";
        case ErrorKind::Convergence: return "convergence";
        case ErrorKind::Degeneracy: return "degeneracy";
        case ErrorKind::Range: return "range";
        case ErrorKind::Integration: return "integration";
        case ErrorKind::Capability: return "capability";
        case ErrorKind::Config: return "config";
    }
    return "unknown";
}

std::string_view to_string(Method m) {
    return m == Method::ExactNumeric ? "exact" : "approx";
}

std::string_view to_string(Knob k) {
    switch (k) {
        case Knob::Coupling: return "g";
        case Knob::Resonator: return "omega";
        case Knob::Tls: return "bigomega";
    }
    return "?";
}

std::string_view to_string(EnergyUnit u) {
    return u == EnergyUnit::TlsFrequency ? "Omega" : "omega";
}

void ModelParams::validate() const {
    if (!std::isfinite(g) || !std::isfinite(omega) || !std::isfinite(big_omega)) {
        throw ParameterError("model parameters must be finite");
    }
    if (g < 0.0) throw ParameterError("coupling g must be >= 0");
    if (omega <= 0.0) throw ParameterError("resonator frequency omega must be > 0");
    if (big_omega < 0.0) throw ParameterError("TLS frequency Omega must be >= 0");
}

double ModelParams::get(Knob k) const {
    switch (k) {
        case Knob::Coupling: return g;
        case Knob::Resonator: return omega;
        case Knob::Tls: return big_omega;
    }
    return 0.0;
}

ModelParams ModelParams::with(Knob k, double value) const {
    ModelParams p = *this;
    switch (k) {
        case Knob::Coupling: p.g = value; break;
        case Knob::Resonator: p.omega = value; break;
        case Knob::Tls: p.big_omega = value; break;
    }
    return p;
}

void TruncationPolicy::validate() const {
    if (n_max < 1) throw ParameterError("truncation n_max must be >= 1");
    if (growth_step < 1) throw ParameterError("truncation growth_step must be >= 1");
    if (!(tol > 0.0)) throw ParameterError("truncation tol must be > 0");
    if (hard_cap < n_max) throw ParameterError("truncation hard_cap must be >= n_max");
    if (hard_cap > kMaxCutoff) throw SizingError("truncation hard_cap exceeds the supported cutoff");
}

Eigen::MatrixXd SectorHamiltonian::matrix() const {
    const Eigen::Index dim = diagonal.size();
    constexpr Eigen::Index kMaxDense = 20'000;
    if (dim > kMaxDense) {
        throw SizingError("sector dimension too large for a dense matrix");
    }
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    h.diagonal() = diagonal;
    for (Eigen::Index i = 0; i + 1 < dim; ++i) {
        h(i, i + 1) = off_diagonal(i);
        h(i + 1, i) = off_diagonal(i);
    }
    return h;
}

namespace {

SectorHamiltonian build_sector(const ModelParams& p, int n_max, int parity) {
    SectorHamiltonian s;
    s.parity = parity;
    s.diagonal.resize(n_max + 1);
    s.off_diagonal.resize(n_max);
    for (int n = 0; n <= n_max; ++n) {
        s.diagonal(n) = 0.5 * p.big_omega * s.spin(n) + p.omega * n;
        if (n < n_max) s.off_diagonal(n) = p.g * std::sqrt(static_cast<double>(n + 1));
    }
    return s;
}

struct SectorSolution {
    int parity;
    Eigen::VectorXd values;   // lowest `count` eigenvalues, ascending
    Eigen::MatrixXd vectors;  // matching columns; empty when not requested
};

// Lowest `count` eigenpairs of a symmetric tridiagonal block (LAPACK dstevr).
SectorSolution solve_sector(const SectorHamiltonian& block, std::size_t count, bool want_vectors) {
    const auto n = static_cast<lapack_int>(block.diagonal.size());
    const auto iu = static_cast<lapack_int>(std::min<std::size_t>(count, static_cast<std::size_t>(n)));
    std::vector<double> d(block.diagonal.data(), block.diagonal.data() + n);
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    std::copy(block.off_diagonal.data(), block.off_diagonal.data() + block.off_diagonal.size(),
              e.begin());
    std::vector<double> w(static_cast<std::size_t>(n));
    std::vector<double> z(want_vectors ? static_cast<std::size_t>(n) * iu : 1);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(iu));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dstevr(
        LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, iu,
        0.0, &found, w.data(), z.data(), want_vectors ? n : 1, isuppz.data());
    if (info != 0 || found != iu) {
        throw ConvergenceError("tridiagonal eigensolver failed (dstevr info " +
                               std::to_string(info) + ")");
    }
    SectorSolution out{block.parity, Eigen::Map<Eigen::VectorXd>(w.data(), iu), {}};
    if (want_vectors) out.vectors = Eigen::Map<Eigen::MatrixXd>(z.data(), n, iu);
    return out;
}

struct LevelRef {
    double energy;
    int parity;
    Eigen::Index index;  // position inside its sector
};

// Lowest k levels across both sectors. Ties are broken by parity (-1 first)
// so the ordering is deterministic at exact degeneracies.
std::vector<LevelRef> merge_lowest(const SectorSolution& plus, const SectorSolution& minus,
                                   std::size_t k) {
    std::vector<LevelRef> all;
    const auto take = static_cast<Eigen::Index>(k);
    for (Eigen::Index i = 0; i < std::min(take, plus.values.size()); ++i) {
        all.push_back({plus.values(i), +1, i});
    }
    for (Eigen::Index i = 0; i < std::min(take, minus.values.size()); ++i) {
        all.push_back({minus.values(i), -1, i});
    }
    std::stable_sort(all.begin(), all.end(), [](const LevelRef& a, const LevelRef& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        return a.parity < b.parity;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

void check_cutoff(int n_max) {
    if (n_max < 1) throw ParameterError("boson cutoff must be >= 1");
    if (n_max > kMaxCutoff) throw SizingError("boson cutoff exceeds the supported maximum");
}

struct Solved {
    ParityBlocks blocks;
    SectorSolution plus;
    SectorSolution minus;
};

Solved solve_at(const ModelParams& params, int n_max, std::size_t k, bool want_vectors) {
    ParityBlocks blocks = build_hamiltonian(params, n_max);
    // The k lowest overall levels are among the k lowest of each sector.
    SectorSolution plus = solve_sector(blocks.plus, k, want_vectors);
    SectorSolution minus = solve_sector(blocks.minus, k, want_vectors);
    return {std::move(blocks), std::move(plus), std::move(minus)};
}

LevelPair pair_from(const std::vector<LevelRef>& refs, int n_used) {
    LevelPair lp;
    lp.e0 = refs[0].energy;
    lp.e1 = refs[1].energy;
    lp.parity0 = refs[0].parity;
    lp.parity1 = refs[1].parity;
    lp.method = Method::ExactNumeric;
    lp.n_used = n_used;
    lp.converged = true;
    return lp;
}

// Adaptive cutoff loop shared by exact_levels and level_slopes. Returns the
// solution at the last cutoff visited.
struct Converged {
    Solved solved;
    std::vector<LevelRef> refs;
    int n_used;
    bool converged;
};

Converged converge(const ModelParams& params, const TruncationPolicy& policy, std::size_t k,
                   bool want_vectors) {
    params.validate();
    policy.validate();
    int n = policy.n_max;
    Solved prev = solve_at(params, n, k, want_vectors);
    std::vector<LevelRef> prev_refs = merge_lowest(prev.plus, prev.minus, k);
    for (;;) {
        const int next = n + policy.growth_step;
        if (next > policy.hard_cap) {
            return {std::move(prev), std::move(prev_refs), n, false};
        }
        Solved cur = solve_at(params, next, k, want_vectors);
        std::vector<LevelRef> cur_refs = merge_lowest(cur.plus, cur.minus, k);
        bool ok = cur_refs.size() == prev_refs.size();
        for (std::size_t i = 0; ok && i < cur_refs.size(); ++i) {
            ok = std::abs(cur_refs[i].energy - prev_refs[i].energy) <= policy.tol;
        }
        if (ok) return {std::move(cur), std::move(cur_refs), next, true};
        n = next;
        prev = std::move(cur);
        prev_refs = std::move(cur_refs);
    }
}

}  // namespace

ParityBlocks build_hamiltonian(const ModelParams& params, int n_max) {
    params.validate();
    check_cutoff(n_max);
    return {build_sector(params, n_max, +1), build_sector(params, n_max, -1)};
}

Eigen::VectorXd EigenSystem::full_state(std::size_t level) const {
    const Eigen::VectorXd& v = states.at(level);
    const int parity = parity_labels.at(level);
    Eigen::VectorXd full = Eigen::VectorXd::Zero(2 * v.size());
    for (Eigen::Index n = 0; n < v.size(); ++n) {
        const int s = (n % 2 == 0) ? parity : -parity;
        full(2 * n + (s == +1 ? 0 : 1)) = v(n);
    }
    return full;
}

double parity_expectation(const Eigen::VectorXd& full_state) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < full_state.size(); ++i) {
        const Eigen::Index n = i / 2;
        const int s = (i % 2 == 0) ? +1 : -1;
        const int sign = s * ((n % 2 == 0) ? 1 : -1);
        acc += sign * full_state(i) * full_state(i);
    }
    return acc;
}

namespace {

EigenSystem to_eigen_system(const ModelParams& params, const Solved& solved,
                            const std::vector<LevelRef>& refs, int cutoff) {
    EigenSystem sys;
    sys.params = params;
    sys.cutoff = cutoff;
    for (const LevelRef& r : refs) {
        const SectorSolution& s = (r.parity == +1) ? solved.plus : solved.minus;
        sys.energies.push_back(r.energy);
        sys.parity_labels.push_back(r.parity);
        sys.states.emplace_back(s.vectors.col(r.index));
    }
    return sys;
}

}  // namespace

EigenSystem eigen_system_at_cutoff(const ModelParams& params, int n_max, std::size_t k) {
    Solved solved = solve_at(params, n_max, k, true);
    return to_eigen_system(params, solved, merge_lowest(solved.plus, solved.minus, k), n_max);
}

EigenSystem eigen_system(const ModelParams& params, const TruncationPolicy& policy, std::size_t k) {
    Converged c = converge(params, policy, k, true);
    if (!c.converged) {
        std::ostringstream os;
        os << "spectrum not converged at hard cap " << policy.hard_cap;
        throw ConvergenceError(os.str());
    }
    return to_eigen_system(params, c.solved, c.refs, c.n_used);
}

LevelPair exact_levels_at_cutoff(const ModelParams& params, int n_max) {
    Solved solved = solve_at(params, n_max, 2, false);
    return pair_from(merge_lowest(solved.plus, solved.minus, 2), n_max);
}

LevelPair exact_levels(const ModelParams& params, const TruncationPolicy& policy) {
    Converged c = converge(params, policy, 2, false);
    LevelPair lp = pair_from(c.refs, c.n_used);
    lp.converged = c.converged;
    return lp;
}

LevelPair approx_levels(const ModelParams& params) {
    params.validate();
    const double shift = -params.g * params.g / params.omega;
    const double half_gap =
        0.5 * params.big_omega * std::exp(-2.0 * params.g * params.g / (params.omega * params.omega));
    LevelPair lp;
    lp.e0 = shift - half_gap;
    lp.e1 = shift + half_gap;
    lp.method = Method::Approximate;
    lp.n_used = 0;
    lp.converged = true;
    return lp;
}

LevelPair levels(const ModelParams& params, Method method, const TruncationPolicy& policy) {
    return method == Method::ExactNumeric ? exact_levels(params, policy) : approx_levels(params);
}

double sector_expectation(const SectorHamiltonian& block, const Eigen::VectorXd& v, Knob knob) {
    double acc = 0.0;
    const Eigen::Index dim = v.size();
    switch (knob) {
        case Knob::Coupling:
            // sigma_x (a^dag + a): couples n and n+1 with amplitude sqrt(n+1).
            for (Eigen::Index n = 0; n + 1 < dim; ++n) {
                acc += 2.0 * v(n) * v(n + 1) * std::sqrt(static_cast<double>(n + 1));
            }
            break;
        case Knob::Resonator:
            for (Eigen::Index n = 0; n < dim; ++n) acc += static_cast<double>(n) * v(n) * v(n);
            break;
        case Knob::Tls:
            for (Eigen::Index n = 0; n < dim; ++n) {
                acc += 0.5 * block.spin(static_cast<int>(n)) * v(n) * v(n);
            }
            break;
    }
    return acc;
}

namespace {

LevelSlopes approx_slopes(const ModelParams& p, Knob knob) {
    LevelSlopes out;
    out.levels = approx_levels(p);
    const double x = std::exp(-2.0 * p.g * p.g / (p.omega * p.omega));
    double d_shift = 0.0;
    double d_half_gap = 0.0;  // derivative of (Omega/2) e^{-2 g^2/omega^2}
    switch (knob) {
        case Knob::Coupling:
            d_shift = -2.0 * p.g / p.omega;
            d_half_gap = 0.5 * p.big_omega * x * (-4.0 * p.g / (p.omega * p.omega));
            break;
        case Knob::Resonator:
            d_shift = p.g * p.g / (p.omega * p.omega);
            d_half_gap = 0.5 * p.big_omega * x * (4.0 * p.g * p.g / (p.omega * p.omega * p.omega));
            break;
        case Knob::Tls:
            d_shift = 0.0;
            d_half_gap = 0.5 * x;
            break;
    }
    out.d0 = d_shift - d_half_gap;
    out.d1 = d_shift + d_half_gap;
    return out;
}

}  // namespace

namespace {

LevelSlopes slopes_from(const Solved& solved, const std::vector<LevelRef>& refs, int n_used, Knob knob) {
    LevelSlopes out;
    out.levels = pair_from(refs, n_used);
    if (level_gap(out.levels) < kDegeneracyThreshold) {
        throw DegeneracyError("levels are degenerate; derivative undefined");
    }
    auto slope = [&](const LevelRef& r) {
        const bool plus = r.parity == +1;
        const SectorHamiltonian& block = plus ? solved.blocks.plus : solved.blocks.minus;
        const SectorSolution& sol = plus ? solved.plus : solved.minus;
        return sector_expectation(block, sol.vectors.col(r.index), knob);
    };
    out.d0 = slope(refs[0]);
    out.d1 = slope(refs[1]);
    return out;
}

}  // namespace

LevelSlopes level_slopes(const ModelParams& params, Knob knob, Method method,
                         const TruncationPolicy& policy) {
    if (method == Method::Approximate) {
        LevelSlopes s = approx_slopes(params, knob);
        if (level_gap(s.levels) < kDegeneracyThreshold) {
            throw DegeneracyError("levels are degenerate; derivative undefined");
        }
        return s;
    }
    Converged c = converge(params, policy, 2, true);
    if (!c.converged) {
        throw ConvergenceError("spectrum not converged at hard cap; derivative unavailable");
    }
    return slopes_from(c.solved, c.refs, c.n_used, knob);
}

LevelSlopes level_slopes_at_cutoff(const ModelParams& params, Knob knob, int n_max) {
    params.validate();
    check_cutoff(n_max);
    const Solved solved = solve_at(params, n_max, 2, true);
    const auto refs = merge_lowest(solved.plus, solved.minus, 2);
    return slopes_from(solved, refs, n_max, knob);
}

double level_derivative(const ModelParams& params, Knob knob, int level, Method method,
                        const TruncationPolicy& policy) {
    if (level != 0 && level != 1) throw ParameterError("level must be 0 or 1");
    const LevelSlopes s = level_slopes(params, knob, method, policy);
    return level == 0 ? s.d0 : s.d1;
}

}  // namespace rabi
