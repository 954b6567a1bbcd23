#pragma once

// Quantum Rabi spectrum: truncated-Fock diagonalization per parity sector,
// the displaced-oscillator closed form for the two lowest levels, and
// parameter derivatives of those levels.
//
// Convention (hbar = 1):
//   H = (Omega/2) sigma_z + omega a^dag a + g sigma_x (a^dag + a)
// The half prefactor on the TLS term makes the g -> 0 limit of the exact
// spectrum coincide with the closed form E_{0,1} = -g^2/omega -/+ (Omega/2) e^{-2 g^2/omega^2}.

#include <array>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rabi/errors.hpp"

namespace rabi {

/// Energy unit the run is expressed in. g- and omega-studies measure energies
/// in units of the TLS frequency; Omega-studies in units of the resonator frequency.
enum class EnergyUnit { TlsFrequency, ResonatorFrequency };

enum class Method { ExactNumeric, Approximate };

/// Which model parameter a derivative or a cycle acts on.
enum class Knob { Coupling, Resonator, Tls };

std::string_view to_string(Method m);
std::string_view to_string(Knob k);
std::string_view to_string(EnergyUnit u);

/// Levels closer than this (declared units) are treated as degenerate.
inline constexpr double kDegeneracyThreshold = 1e-8;

/// Largest boson cutoff accepted by build_hamiltonian.
inline constexpr int kMaxCutoff = 1'000'000;

struct ModelParams {
    double g = 0.0;          // coupling strength
    double omega = 1.0;      // resonator frequency
    double big_omega = 1.0;  // TLS transition frequency
    EnergyUnit unit = EnergyUnit::TlsFrequency;

    /// Throws ParameterError unless g >= 0, omega > 0, Omega >= 0 (all finite).
    void validate() const;

    double get(Knob k) const;
    ModelParams with(Knob k, double value) const;
};

struct TruncationPolicy {
    int n_max = 40;
    int growth_step = 20;
    double tol = 1e-10;
    int hard_cap = 400;

    void validate() const;
};

struct LevelPair {
    double e0 = 0.0;
    double e1 = 0.0;
    Method method = Method::Approximate;
    int n_used = 0;  // 0 for Approximate
    bool converged = true;
    // Parity (+1/-1) of the state behind each level; 0 for Approximate.
    int parity0 = 0;
    int parity1 = 0;
};

/// One parity block of the Hamiltonian in the basis |s_n, n>, n = 0..n_max,
/// where the spin s_n = parity * (-1)^n is fixed by the sector. The block is
/// tridiagonal: diagonal (Omega/2) s_n + omega n, off-diagonal g sqrt(n+1).
struct SectorHamiltonian {
    int parity = +1;
    Eigen::VectorXd diagonal;
    Eigen::VectorXd off_diagonal;

    int cutoff() const { return static_cast<int>(diagonal.size()) - 1; }
    /// Spin quantum number (+1/-1) of basis state n in this sector.
    int spin(int n) const { return (n % 2 == 0) ? parity : -parity; }
    Eigen::MatrixXd matrix() const;
};

struct ParityBlocks {
    SectorHamiltonian plus;   // parity +1
    SectorHamiltonian minus;  // parity -1
};

ParityBlocks build_hamiltonian(const ModelParams& params, int n_max);

/// Lowest k eigenpairs of the truncated model, stored per parity sector.
struct EigenSystem {
    ModelParams params;
    int cutoff = 0;
    std::vector<double> energies;          // ascending
    std::vector<int> parity_labels;        // +1 / -1 per level
    std::vector<Eigen::VectorXd> states;   // sector-basis eigenvector per level

    /// Eigenvector of `level` lifted into the full TLS (x) Fock product basis.
    /// Index layout: 2*n + (s == +1 ? 0 : 1).
    Eigen::VectorXd full_state(std::size_t level) const;
};

/// Expectation of the parity operator sigma_z (x) (-1)^{a^dag a} for a vector
/// in the full product basis with the layout of EigenSystem::full_state.
double parity_expectation(const Eigen::VectorXd& full_state);

/// Eigenpairs at a fixed cutoff (no convergence loop).
EigenSystem eigen_system_at_cutoff(const ModelParams& params, int n_max, std::size_t k);

/// Eigenpairs with the adaptive cutoff loop applied to all k returned energies.
/// Throws ConvergenceError if the hard cap is reached first.
EigenSystem eigen_system(const ModelParams& params, const TruncationPolicy& policy, std::size_t k);

LevelPair exact_levels_at_cutoff(const ModelParams& params, int n_max);

/// Two lowest levels with the adaptive cutoff loop. Non-convergence is
/// reported through `converged == false`, not thrown.
LevelPair exact_levels(const ModelParams& params, const TruncationPolicy& policy = {});

LevelPair approx_levels(const ModelParams& params);

LevelPair levels(const ModelParams& params, Method method, const TruncationPolicy& policy = {});

inline double level_gap(const LevelPair& pair) { return pair.e1 - pair.e0; }

/// Levels together with their derivatives with respect to one knob.
struct LevelSlopes {
    LevelPair levels;
    double d0 = 0.0;
    double d1 = 0.0;
};

/// dE_0/dxi and dE_1/dxi. Approximate: analytic derivative of the closed form.
/// ExactNumeric: Hellmann-Feynman <n| dH/dxi |n> on the converged eigenvectors.
/// Throws DegeneracyError when the gap is below kDegeneracyThreshold and
/// ConvergenceError when the exact spectrum does not converge.
LevelSlopes level_slopes(const ModelParams& params, Knob knob, Method method,
                         const TruncationPolicy& policy = {});

/// Hellmann-Feynman slopes of the exact levels at a fixed cutoff. Smooth in
/// the parameters, unlike the adaptive variant whose cutoff can switch.
LevelSlopes level_slopes_at_cutoff(const ModelParams& params, Knob knob, int n_max);

double level_derivative(const ModelParams& params, Knob knob, int level, Method method,
                        const TruncationPolicy& policy = {});

/// <v| dH/dxi |v> for a sector eigenvector v of `block`.
double sector_expectation(const SectorHamiltonian& block, const Eigen::VectorXd& v,
                          Knob knob);

}  // namespace rabi
