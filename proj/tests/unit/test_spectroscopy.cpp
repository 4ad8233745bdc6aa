#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "granoise/constants.hpp"
#include "granoise/errors.hpp"
#include "granoise/spectroscopy.hpp"
#include "oracles.hpp"

using namespace granoise;
using constants::two_pi;

namespace {

FourLevelParams default_levels() {
    FourLevelParams p;
    p.omega_c_rabi = two_pi * 1e6;
    p.omega_s_rabi = two_pi * 7.9e6;
    p.gamma2 = two_pi * 5.22e6;
    p.gamma3 = two_pi * 10e3;
    p.gamma4 = two_pi * 10e3;
    p.k_p = two_pi / 852e-9;
    p.k_c = -two_pi / 510e-9;
    p.mu12 = 2.7e-29;
    p.mu_s = 1000 * constants::elementary_charge * constants::bohr_radius;
    return p;
}

oracle::Ladder to_oracle(const FourLevelParams& p) {
    return {p.omega_p_rabi, p.omega_c_rabi, p.omega_s_rabi, p.delta_p, p.delta_c,
            p.delta_s,      p.gamma2,       p.gamma3,       p.gamma4};
}

double rel_diff(std::complex<double> a, std::complex<double> b) {
    return std::abs(a - b) / std::abs(b);
}

FourLevelParams random_levels(std::mt19937_64& rng, double omega_p_fraction) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FourLevelParams p = default_levels();
    p.gamma2 = two_pi * (2e6 + 8e6 * u(rng));
    p.gamma3 = two_pi * (1e3 + 1e5 * u(rng));
    p.gamma4 = two_pi * (1e3 + 1e5 * u(rng));
    p.omega_c_rabi = two_pi * (0.2e6 + 5e6 * u(rng));
    p.omega_s_rabi = two_pi * (20e6 * u(rng));
    p.delta_p = two_pi * (-10e6 + 20e6 * u(rng));
    p.delta_c = two_pi * (-5e6 + 10e6 * u(rng));
    p.delta_s = two_pi * (-5e6 + 10e6 * u(rng));
    p.omega_p_rabi = omega_p_fraction * p.gamma2 * (0.1 + 0.9 * u(rng));
    return p;
}

// Local maxima (or minima) of alpha_I on a uniform detuning grid.
std::vector<double> local_extrema(const std::vector<double>& x, const std::vector<double>& y, bool maxima) {
    std::vector<double> out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        const bool is_ext = maxima ? (y[i] > y[i - 1] && y[i] > y[i + 1]) : (y[i] < y[i - 1] && y[i] < y[i + 1]);
        if (is_ext) out.push_back(x[i]);
    }
    return out;
}

}  // namespace

TEST_CASE("doppler_shift leaves parameters unchanged at zero velocity") {
    const FourLevelParams p = default_levels();
    const FourLevelParams q = doppler_shift(p, 0.0);
    CHECK(q.delta_p == p.delta_p);
    CHECK(q.delta_c == p.delta_c);
    CHECK(q.delta_s == p.delta_s);
}

TEST_CASE("doppler_shift shifts probe and coupling detunings by k v") {
    const FourLevelParams q = doppler_shift(default_levels(), 100.0);
    // Hand arithmetic: 2 pi / 852 nm * 100 m/s and 2 pi / 510 nm * 100 m/s.
    CHECK(q.delta_p == doctest::Approx(-7.374e8).epsilon(1e-4));
    CHECK(q.delta_c == doctest::Approx(1.232e9).epsilon(1e-3));
    CHECK(q.delta_s == 0.0);
}

TEST_CASE("weak-probe two-level limit is purely imaginary mu^2/(hbar gamma21)") {
    FourLevelParams p = default_levels();
    p.omega_c_rabi = 0.0;
    p.omega_s_rabi = 0.0;
    const Polarizability a = weak_probe_alpha(p, 0.0);
    const double expected = p.mu12 * p.mu12 / (constants::hbar * p.gamma2 / 2.0);
    CHECK(a.alpha_r == 0.0);
    CHECK(a.alpha_i == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("coupling field suppresses resonant absorption by 1/(1 + Omega_c^2/(4 gamma21 gamma31))") {
    FourLevelParams p = default_levels();
    p.omega_s_rabi = 0.0;
    p.gamma3 = two_pi * 200e3;
    FourLevelParams two_level = p;
    two_level.omega_c_rabi = 0.0;
    const double g21 = p.coherence_decay(2, 1), g31 = p.coherence_decay(3, 1);
    const double factor = 1.0 / (1.0 + p.omega_c_rabi * p.omega_c_rabi / (4.0 * g21 * g31));
    const double ratio = weak_probe_alpha(p, 0.0).alpha_i / weak_probe_alpha(two_level, 0.0).alpha_i;
    CHECK(ratio == doctest::Approx(factor).epsilon(1e-12));

    // Independent Lindblad oracle at a tiny probe.
    p.omega_p_rabi = p.gamma2 * 1e-4;
    two_level.omega_p_rabi = p.omega_p_rabi;
    const double oracle_ratio =
        oracle::alpha_from_oracle(to_oracle(p), p.mu12).imag() / oracle::alpha_from_oracle(to_oracle(two_level), p.mu12).imag();
    CHECK(ratio == doctest::Approx(oracle_ratio).epsilon(1e-4));
}

TEST_CASE("microwave dressing produces Autler-Townes features at delta_p = +-Omega_s/2") {
    // With a strong coupling the dressed Rydberg pair appears as two
    // absorption maxima; with the default weak coupling the same dressed
    // resonances show up as two transparency windows.
    const auto scan = [](FourLevelParams p, bool maxima) {
        const double half = p.omega_s_rabi / 2.0;
        std::vector<double> x, y, y_oracle;
        const int n = 4001;
        for (int k = 0; k < n; ++k) {
            p.delta_p = -2.0 * half + 4.0 * half * k / (n - 1);
            x.push_back(p.delta_p);
            y.push_back(weak_probe_alpha(p, 0.0).alpha_i);
        }
        auto ext = local_extrema(x, y, maxima);
        // Drop the extremum at line centre, keep the symmetric pair.
        std::erase_if(ext, [&](double d) { return std::abs(d) < 0.25 * half; });
        REQUIRE(ext.size() == 2);
        CHECK(ext[0] == doctest::Approx(-half).epsilon(0.05));
        CHECK(ext[1] == doctest::Approx(half).epsilon(0.05));
        // The Lindblad oracle agrees at the located features.
        for (double d : ext) {
            p.delta_p = d;
            p.omega_p_rabi = p.gamma2 * 1e-4;
            const double ours = weak_probe_alpha(p, 0.0).alpha_i;
            const double theirs = oracle::alpha_from_oracle(to_oracle(p), p.mu12).imag();
            CHECK(ours == doctest::Approx(theirs).epsilon(1e-3));
            p.omega_p_rabi = 0.0;
        }
    };
    SUBCASE("strong coupling: absorption maxima") {
        FourLevelParams p = default_levels();
        p.omega_c_rabi = two_pi * 10e6;
        p.omega_s_rabi = two_pi * 60e6;
        scan(p, true);
    }
    SUBCASE("default coupling: transparency minima") {
        scan(default_levels(), false);
    }
}

TEST_CASE("weak-probe denominator with no decay and no detuning is singular") {
    FourLevelParams p;
    p.mu12 = 1e-29;
    CHECK_THROWS_AS(weak_probe_alpha(p, 0.0), SingularityError);
}

TEST_CASE("steady state with all fields off is the ground state") {
    FourLevelParams p = default_levels();
    p.omega_c_rabi = p.omega_s_rabi = p.omega_p_rabi = 0.0;
    const DensityMatrix4 rho = steady_state(p, 0.0);
    CHECK(rho(1, 1) == std::complex<double>(1.0, 0.0));
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j)
            if (i != 1 || j != 1) CHECK(std::abs(rho(i, j)) == 0.0);
}

TEST_CASE("steady state is Hermitian, unit trace and positive for random parameters") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> vel(-400.0, 400.0);
    for (int k = 0; k < 200; ++k) {
        const FourLevelParams p = random_levels(rng, k % 2 ? 3.0 : 0.05);
        const DensityMatrix4 rho = steady_state(p, vel(rng));
        CHECK(rho.hermiticity_error() < 1e-10);
        CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
        CHECK(rho.min_eigenvalue() > -1e-9);
    }
}

TEST_CASE("steady state matches the independent Lindblad oracle") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 20; ++k) {
        const FourLevelParams p = random_levels(rng, 2.0);
        const Eigen::Matrix4cd ours = steady_state(p, 0.0).matrix();
        const Eigen::Matrix4cd theirs = oracle::lindblad_steady_state(to_oracle(p));
        CHECK((ours - theirs).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("ill-conditioned Liouvillian reports its condition number") {
    FourLevelParams p = default_levels();
    p.omega_p_rabi = p.gamma2;
    p.omega_c_rabi = 0.0;
    p.omega_s_rabi = 0.0;
    p.gamma3 = 0.0;
    p.gamma4 = 0.0;  // levels 3 and 4 are disconnected and undamped
    try {
        steady_state(p, 0.0);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.condition_number() > 1e14);
    }
}

TEST_CASE("full solver reproduces the weak-probe polarizability at a tiny probe") {
    FourLevelParams p = default_levels();
    p.delta_p = two_pi * 0.7e6;
    p.omega_p_rabi = p.gamma2 / 1000.0;
    for (double v : {0.0, 1.5, -40.0}) {
        const auto full = polarizability(p, v, ResponseMode::full).value();
        const auto weak = weak_probe_alpha(p, v).value();
        CHECK(rel_diff(full, weak) < 1e-2);
    }
}

TEST_CASE("randomized 20-point sweep: full and weak-probe agree for Omega_p <= Gamma2/100") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> vel(-300.0, 300.0);
    for (int k = 0; k < 20; ++k) {
        const FourLevelParams p = random_levels(rng, 0.01);
        const double v = vel(rng);
        const auto full = polarizability(p, v, ResponseMode::full).value();
        const auto weak = weak_probe_alpha(p, v).value();
        CHECK(rel_diff(full, weak) < 1e-2);
    }
}

TEST_CASE("alpha_from_coherence without coherence is zero") {
    FourLevelParams p = default_levels();
    p.omega_p_rabi = 1e6;
    const Polarizability a = alpha_from_coherence(DensityMatrix4{}, p);
    CHECK(a.alpha_r == 0.0);
    CHECK(a.alpha_i == 0.0);
}

TEST_CASE("alpha_from_coherence refuses a zero probe Rabi frequency") {
    CHECK_THROWS_AS(alpha_from_coherence(DensityMatrix4{}, default_levels()), SingularityError);
}

TEST_CASE("two-level saturation reduces absorption by 1/(1 + 2 (Omega_p/Gamma2)^2)") {
    FourLevelParams p = default_levels();
    p.omega_c_rabi = p.omega_s_rabi = 0.0;
    for (double s : {0.1, 0.5, 1.0, 3.0}) {
        p.omega_p_rabi = s * p.gamma2;
        const double ratio = polarizability(p, 0.0, ResponseMode::full).alpha_i / weak_probe_alpha(p, 0.0).alpha_i;
        CHECK(ratio == doctest::Approx(oracle::two_level_saturation(p.omega_p_rabi, p.gamma2)).epsilon(1e-9));
    }
}

TEST_CASE("absorption is positive for resonant and detuned configurations") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> vel(-500.0, 500.0);
    for (int k = 0; k < 200; ++k) {
        const FourLevelParams p = random_levels(rng, k % 3 ? 0.0 : 1.0);
        const double v = vel(rng);
        CHECK(weak_probe_alpha(p, v).alpha_i > 0.0);
        if (p.omega_p_rabi > 0.0) CHECK(polarizability(p, v, ResponseMode::full).alpha_i > 0.0);
    }
}

TEST_CASE("Doppler symmetry for equal counter-propagating wavenumbers") {
    FourLevelParams p = default_levels();
    p.k_c = -p.k_p;
    for (double v : {0.3, 2.0, 17.0, 150.0}) {
        CHECK(weak_probe_alpha(p, v).alpha_i == doctest::Approx(weak_probe_alpha(p, -v).alpha_i).epsilon(1e-12));
        p.omega_p_rabi = p.gamma2;
        CHECK(polarizability(p, v, ResponseMode::full).alpha_i ==
              doctest::Approx(polarizability(p, -v, ResponseMode::full).alpha_i).epsilon(1e-9));
        p.omega_p_rabi = 0.0;
    }
}

TEST_CASE("alpha is smooth in Omega_s: central differences converge at second order") {
    FourLevelParams p = default_levels();
    p.delta_p = two_pi * 2e6;
    const auto d = [&](double h) {
        FourLevelParams hi = p, lo = p;
        hi.omega_s_rabi += h;
        lo.omega_s_rabi -= h;
        return (weak_probe_alpha(hi, 0.0).alpha_i - weak_probe_alpha(lo, 0.0).alpha_i) / (2 * h);
    };
    const double h = two_pi * 200e3;
    const double ratio = (d(h) - d(h / 2)) / (d(h / 2) - d(h / 4));
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("parameter validation rejects unphysical inputs") {
    FourLevelParams p = default_levels();
    p.gamma2 = 0.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = default_levels();
    p.gamma3 = -1.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = default_levels();
    p.omega_c_rabi = -1.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = default_levels();
    p.delta_p = std::nan("");
    CHECK_THROWS_AS(p.validate(), DomainError);
    CHECK(default_levels().k_p * default_levels().k_c < 0.0);
}
