#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "rabi/spectrum.hpp"

using namespace rabi;

namespace {

std::vector<double> sector_spectrum(const ParityBlocks& b) {
    std::vector<double> all;
    for (const SectorHamiltonian* s : {&b.plus, &b.minus}) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s->matrix(), Eigen::EigenvaluesOnly);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) all.push_back(es.eigenvalues()(i));
    }
    std::sort(all.begin(), all.end());
    return all;
}

}  // namespace

TEST_CASE("sector blocks have dimension n_max + 1 and are symmetric") {
    const ParityBlocks b = build_hamiltonian({0.7, 1.3, 0.9}, 25);
    for (const SectorHamiltonian* s : {&b.plus, &b.minus}) {
        const Eigen::MatrixXd m = s->matrix();
        CHECK(m.rows() == 26);
        CHECK(m.cols() == 26);
        CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("direct sum of sectors is isospectral with the dense truncated Hamiltonian") {
    for (auto [g, w, big] : {std::tuple{0.3, 1.0, 1.0}, {1.1, 0.8, 1.7}, {2.5, 1.0, 0.4}}) {
        const int n = 30;
        const auto ours = sector_spectrum(build_hamiltonian({g, w, big}, n));
        const auto ref = oracle::dense_lowest(g, w, big, n, 2 * (n + 1));
        REQUIRE(ours.size() == ref.size());
        for (std::size_t i = 0; i < ours.size(); ++i) CHECK(ours[i] == doctest::Approx(ref[i]).epsilon(1e-11));
    }
}

TEST_CASE("decoupled spectrum is the bare atom times the oscillator") {
    const auto spec = sector_spectrum(build_hamiltonian({0.0, 1.0, 1.0}, 10));
    std::vector<double> expected;
    for (int n = 0; n <= 10; ++n) {
        expected.push_back(-0.5 + n);
        expected.push_back(0.5 + n);
    }
    std::sort(expected.begin(), expected.end());
    REQUIRE(spec.size() == expected.size());
    for (std::size_t i = 0; i < spec.size(); ++i) CHECK(spec[i] == doctest::Approx(expected[i]).epsilon(1e-13));
}

TEST_CASE("zero TLS frequency gives the displaced-oscillator ladder, doubly degenerate") {
    const EigenSystem es = eigen_system({1.0, 1.0, 0.0}, TruncationPolicy{}, 6);
    const double expected[] = {-1.0, -1.0, 0.0, 0.0, 1.0, 1.0};
    for (int i = 0; i < 6; ++i) CHECK(std::abs(es.energies[i] - expected[i]) < 1e-9);
}

TEST_CASE("two lowest levels at g = omega = Omega = 1 match a dense diagonalization at n_max = 200") {
    const LevelPair lp = exact_levels_at_cutoff({1.0, 1.0, 1.0}, 60);
    const auto ref = oracle::dense_lowest(1.0, 1.0, 1.0, 200, 2);
    CHECK(std::abs(lp.e0 - ref[0]) < 1e-10);
    CHECK(std::abs(lp.e1 - ref[1]) < 1e-10);
}

TEST_CASE("exact levels: decoupled and zero-frequency examples") {
    const LevelPair a = exact_levels({0.0, 1.0, 1.0});
    CHECK(a.converged);
    CHECK(a.e0 == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(a.e1 == doctest::Approx(0.5).epsilon(1e-14));

    const LevelPair b = exact_levels({1.5, 1.0, 0.0});
    CHECK(b.converged);
    CHECK(std::abs(b.e0 + 2.25) < 1e-9);
    CHECK(std::abs(b.e1 + 2.25) < 1e-9);
    CHECK(level_gap(b) < 1e-9);
}

TEST_CASE("deep coupling needs a deep cutoff and is stable under a larger hard cap") {
    const LevelPair lp = exact_levels({3.0, 1.0, 1.0});
    CHECK(lp.converged);
    CHECK(lp.n_used >= 60);
    TruncationPolicy wide;
    wide.hard_cap = 800;
    wide.n_max = 2 * lp.n_used;
    const LevelPair deep = exact_levels({3.0, 1.0, 1.0}, wide);
    CHECK(std::abs(deep.e0 - lp.e0) < 1e-10);
    CHECK(std::abs(deep.e1 - lp.e1) < 1e-10);
}

TEST_CASE("non-convergence at the hard cap is reported, not thrown") {
    TruncationPolicy tight;
    tight.n_max = 2;
    tight.growth_step = 2;
    tight.hard_cap = 6;
    const LevelPair lp = exact_levels({3.0, 1.0, 1.0}, tight);
    CHECK_FALSE(lp.converged);
    CHECK(lp.n_used == 6);
    CHECK_THROWS_AS(level_slopes({3.0, 1.0, 1.0}, Knob::Coupling, Method::ExactNumeric, tight),
                    ConvergenceError);
}

TEST_CASE("approximate levels") {
    const LevelPair a = approx_levels({0.0, 1.0, 1.0});
    CHECK(a.e0 == -0.5);
    CHECK(a.e1 == 0.5);
    CHECK(a.n_used == 0);
    CHECK(a.method == Method::Approximate);

    const LevelPair b = approx_levels({1.0, 1.0, 1.0});
    CHECK(b.e0 == doctest::Approx(-1.0 - 0.5 * std::exp(-2.0)).epsilon(1e-15));
    CHECK(b.e1 == doctest::Approx(-1.0 + 0.5 * std::exp(-2.0)).epsilon(1e-15));

    const LevelPair c = approx_levels({1.0, 1.0, 2.0});
    CHECK(level_gap(c) == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("level gap") {
    CHECK(level_gap(LevelPair{-0.5, 0.5}) == 1.0);
    CHECK(level_gap(exact_levels({1.0, 1.0, 0.0})) < 1e-9);
    CHECK(level_gap(exact_levels({1.4, 1.0, 1.0})) < 0.05);
}

TEST_CASE("invalid parameters and cutoffs are rejected") {
    CHECK_THROWS_AS(exact_levels({-0.1, 1.0, 1.0}), ParameterError);
    CHECK_THROWS_AS(exact_levels({0.1, 0.0, 1.0}), ParameterError);
    CHECK_THROWS_AS(approx_levels({0.1, 1.0, -1.0}), ParameterError);
    CHECK_THROWS_AS(approx_levels({NAN, 1.0, 1.0}), ParameterError);
    CHECK_THROWS_AS(build_hamiltonian({0.1, 1.0, 1.0}, 0), ParameterError);
    CHECK_THROWS_AS(build_hamiltonian({0.1, 1.0, 1.0}, kMaxCutoff + 1), SizingError);
    TruncationPolicy bad;
    bad.hard_cap = 10;
    CHECK_THROWS_AS(exact_levels({0.1, 1.0, 1.0}, bad), ParameterError);
}

TEST_CASE("approximate derivatives") {
    CHECK(level_derivative({0.0, 1.0, 1.0}, Knob::Coupling, 0, Method::Approximate) == 0.0);

    // dE0/domega = g^2/omega^2 - 2 Omega g^2 e^{-2 g^2/omega^2} / omega^3
    const double d = level_derivative({1.0, 1.0, 1.0}, Knob::Resonator, 0, Method::Approximate);
    const double fd = oracle::central_difference(
        [](double w) { return oracle::approx_e0(1.0, w, 1.0); }, 1.0, 1e-6);
    CHECK(std::abs(d - fd) < 1e-8);
    CHECK(d == doctest::Approx(1.0 - 2.0 * std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("exact derivative at zero TLS frequency") {
    // The pair is degenerate, so the level derivative is refused...
    CHECK_THROWS_AS(level_derivative({1.2, 1.0, 0.0}, Knob::Resonator, 0, Method::ExactNumeric),
                    DegeneracyError);
    // ...while each sector ground state still carries <a^dag a> = g^2/omega^2.
    const ModelParams p{1.2, 1.0, 0.0};
    const EigenSystem es = eigen_system(p, TruncationPolicy{}, 2);
    const ParityBlocks blocks = build_hamiltonian(p, es.cutoff);
    for (std::size_t i = 0; i < 2; ++i) {
        const SectorHamiltonian& b = es.parity_labels[i] == 1 ? blocks.plus : blocks.minus;
        CHECK(std::abs(sector_expectation(b, es.states[i], Knob::Resonator) - 1.44) < 1e-9);
    }
}

TEST_CASE("variational monotonicity of the ground energy in the cutoff") {
    for (double g : {0.5, 1.5, 2.5}) {
        double prev = exact_levels_at_cutoff({g, 1.0, 1.0}, 2).e0;
        for (int n = 4; n <= 80; n += 2) {
            const double e0 = exact_levels_at_cutoff({g, 1.0, 1.0}, n).e0;
            CHECK(e0 <= prev + 1e-13);
            prev = e0;
        }
    }
}

TEST_CASE("eigenvectors are normalized and parity-pure") {
    for (auto [g, w, big] : {std::tuple{0.4, 1.0, 1.0}, {1.3, 0.7, 1.1}, {2.0, 1.0, 3.0}}) {
        const EigenSystem es = eigen_system({g, w, big}, TruncationPolicy{}, 4);
        REQUIRE(es.energies.size() == 4);
        CHECK(std::is_sorted(es.energies.begin(), es.energies.end()));
        for (std::size_t i = 0; i < 4; ++i) {
            const Eigen::VectorXd v = es.full_state(i);
            CHECK(std::abs(v.norm() - 1.0) < 1e-12);
            const double pi = parity_expectation(v);
            CHECK(std::abs(std::abs(pi) - 1.0) < 1e-10);
            CHECK(pi * es.parity_labels[i] > 0.0);
        }
    }
}

TEST_CASE("Hellmann-Feynman slopes agree with central differences on 5x5 grids") {
    const double h = 1e-6;
    struct Case {
        Knob knob;
        Knob other;
        std::vector<double> knob_values;
        std::vector<double> other_values;
    };
    const Case cases[] = {
        {Knob::Coupling, Knob::Tls, {0.1, 0.4, 0.7, 1.0, 1.2}, {0.6, 0.9, 1.2, 1.5, 2.0}},
        {Knob::Resonator, Knob::Coupling, {0.7, 1.0, 1.5, 2.0, 3.0}, {0.2, 0.5, 0.8, 1.0, 1.2}},
        {Knob::Tls, Knob::Coupling, {0.6, 1.0, 2.0, 3.0, 5.0}, {0.2, 0.5, 0.8, 1.0, 1.2}},
    };
    for (const Case& c : cases) {
        for (double x : c.knob_values) {
            for (double y : c.other_values) {
                const ModelParams p = ModelParams{1.0, 1.0, 1.0}.with(c.knob, x).with(c.other, y);
                const LevelSlopes s = level_slopes(p, c.knob, Method::ExactNumeric);
                REQUIRE(level_gap(s.levels) > 1e-3);
                const int n = s.levels.n_used;
                for (int level : {0, 1}) {
                    const double fd = oracle::central_difference(
                        [&](double v) {
                            const LevelPair lp = exact_levels_at_cutoff(p.with(c.knob, v), n);
                            return level == 0 ? lp.e0 : lp.e1;
                        },
                        x, h);
                    CHECK(std::abs((level == 0 ? s.d0 : s.d1) - fd) < 1e-6);
                }
            }
        }
    }
}

TEST_CASE("approximate slopes agree with central differences of the closed form") {
    for (double g : {0.0, 0.3, 0.9, 1.4}) {
        for (Knob k : {Knob::Coupling, Knob::Resonator, Knob::Tls}) {
            const ModelParams p{g, 1.1, 0.9};
            const LevelSlopes s = level_slopes(p, k, Method::Approximate);
            auto e = [&](int level, double v) {
                const ModelParams q = p.with(k, v);
                return level == 0 ? oracle::approx_e0(q.g, q.omega, q.big_omega)
                                  : oracle::approx_e1(q.g, q.omega, q.big_omega);
            };
            const double x = p.get(k);
            CHECK(std::abs(s.d0 - oracle::central_difference([&](double v) { return e(0, v); }, x, 1e-6)) < 1e-8);
            CHECK(std::abs(s.d1 - oracle::central_difference([&](double v) { return e(1, v); }, x, 1e-6)) < 1e-8);
        }
    }
}

TEST_CASE("levels dispatch and ordering") {
    const LevelPair lp = levels({0.8, 1.0, 1.0}, Method::ExactNumeric);
    CHECK(lp.e0 <= lp.e1);
    CHECK(lp.method == Method::ExactNumeric);
    CHECK(lp.parity0 == -1);
    CHECK(lp.parity1 == +1);
    CHECK(levels({0.8, 1.0, 1.0}, Method::Approximate).method == Method::Approximate);
}
