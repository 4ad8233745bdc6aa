#include <doctest.h>

#include <cmath>
#include <vector>

#include "granoise/constants.hpp"
#include "granoise/ensemble_stats.hpp"
#include "granoise/errors.hpp"
#include "granoise/monte_carlo.hpp"
#include "granoise/rng.hpp"

using namespace granoise;
using constants::two_pi;

namespace {

constexpr double kPrefactor = 368731.53211147804;

GasParams cs_gas(double T = 298.15) {
    return {4.89e16, T, 132.905451961 * constants::atomic_mass_unit};
}

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

AtomicModel default_model(double a = kPrefactor) {
    return {default_levels(), cs_gas(), a, {}};
}

// Intrinsic variance of the absorptive quadrature from quadrature.
double quadrature_V_I() {
    const AlphaMoments m = alpha_moments(default_levels(), cs_gas(), ResponseMode::weak_probe);
    return intrinsic_variance(cs_gas(), m.var_alpha_i);
}

double quadrature_mean_chi_i() {
    const AlphaMoments m = alpha_moments(default_levels(), cs_gas(), ResponseMode::weak_probe);
    return cs_gas().density_n / constants::epsilon0 * m.mean_alpha.alpha_i;
}

struct Summary {
    double mean, var, se_mean, se_var;
};

Summary summarize(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double mean = 0;
    for (double v : x) mean += v;
    mean /= n;
    double m2 = 0, m4 = 0;
    for (double v : x) {
        const double d = (v - mean) * (v - mean);
        m2 += d;
        m4 += d * d;
    }
    const double var = m2 / (n - 1);
    return {mean, var, std::sqrt(var / n), std::sqrt((m4 / n - var * var) / n)};
}

template <class Draw>
std::vector<double> draws(std::size_t count, std::uint64_t seed, Draw draw) {
    RandomStream rng = SubstreamFactory(seed).stream(0);
    std::vector<double> x(count);
    for (auto& v : x) v = draw(rng);
    return x;
}

std::vector<double> chi_i_samples(const std::vector<SignalSample>& s, double a) {
    std::vector<double> x;
    x.reserve(s.size());
    for (const auto& v : s) x.push_back(v.atomic_term / a);
    return x;
}

// One large run at the reference operating point, shared by several checks.
const std::vector<SignalSample>& reference_run() {
    static const std::vector<SignalSample> samples = [] {
        TrialConfig c;
        c.seed = 20240611;
        c.trials = 100000;
        c.n_at_mean = 1e4;
        c.n_ph_mean = 1e6;
        return run_trials(c, default_model());
    }();
    return samples;
}

TrialConfig small_config(std::size_t trials, double n_at) {
    TrialConfig c;
    c.seed = 7;
    c.trials = trials;
    c.n_at_mean = n_at;
    c.n_ph_mean = 1e6;
    return c;
}

}  // namespace

TEST_CASE("atom numbers are Poisson distributed") {
    const auto x = draws(100000, 1, [](RandomStream& r) { return double(sample_atom_number(r, 1e4)); });
    const Summary s = summarize(x);
    CHECK(std::abs(s.mean - 1e4) < 3.0 * std::sqrt(1e4 / 1e5));

    const auto big = draws(100000, 2, [](RandomStream& r) { return double(sample_atom_number(r, 1e6)); });
    const Summary b = summarize(big);
    CHECK(std::abs(b.var / b.mean - 1.0) < 3.0 * b.se_var / b.mean);

    CHECK(draws(50, 3, [](RandomStream& r) { return double(sample_atom_number(r, 30.0)); }) ==
          draws(50, 3, [](RandomStream& r) { return double(sample_atom_number(r, 30.0)); }));
    RandomStream rng(0);
    CHECK_THROWS_AS(sample_atom_number(rng, 0.0), DomainError);
}

TEST_CASE("single atom with a frozen velocity distribution returns the resting response") {
    const GasParams cold = cs_gas(1e-30);
    RandomStream rng(5);
    const std::complex<double> chi = sample_chi_bar(rng, 1, default_levels(), cold, ResponseMode::weak_probe);
    const Polarizability a0 = weak_probe_alpha(default_levels(), 0.0);
    CHECK(chi.imag() == doctest::Approx(cold.density_n / constants::epsilon0 * a0.alpha_i).epsilon(1e-12));
    CHECK(chi.real() == doctest::Approx(cold.density_n / constants::epsilon0 * a0.alpha_r).epsilon(1e-12));
    CHECK_THROWS_AS(sample_chi_bar(rng, 0, default_levels(), cold, ResponseMode::weak_probe), EmptyVolumeError);
}

TEST_CASE("photon count statistics follow the Mandel parameter") {
    const auto poisson = summarize(
        draws(100000, 11, [](RandomStream& r) { return double(sample_photon_count(r, 1e4, PhotonStatistics{0.0})); }));
    CHECK(std::abs(poisson.var / poisson.mean - 1.0) < 3.0 * poisson.se_var / poisson.mean);

    const auto fock = summarize(
        draws(1000, 12, [](RandomStream& r) { return double(sample_photon_count(r, 1e4, PhotonStatistics{-1.0})); }));
    CHECK(fock.var == 0.0);
    CHECK(fock.mean == 1e4);

    const auto bunched = summarize(
        draws(100000, 13, [](RandomStream& r) { return double(sample_photon_count(r, 1e4, PhotonStatistics{1.0})); }));
    CHECK(std::abs(bunched.var - 2.0 * 1e4) < 3.0 * bunched.se_var);

    const PhotonStatistics sq{-0.3};
    const PhotonMoments achieved = achieved_photon_moments(1001.0, sq);
    CHECK(achieved.mandel_Q == -0.3);
    CHECK(std::abs(achieved.mean - 1001.0) <= 0.3);
    const auto sub = summarize(
        draws(100000, 14, [&](RandomStream& r) { return double(sample_photon_count(r, 1001.0, sq)); }));
    CHECK(std::abs(sub.mean - achieved.mean) < 3.0 * sub.se_mean);
    CHECK(std::abs(sub.var - achieved.mean * (1.0 + achieved.mandel_Q)) < 3.0 * sub.se_var);

    RandomStream rng(0);
    CHECK_THROWS_AS(sample_photon_count(rng, 10.0, PhotonStatistics{-1.5}), DomainError);
}

TEST_CASE("log of Poisson counts linearizes to 1/N_ph") {
    for (double n_ph : {1e4, 1e5}) {
        const auto x = draws(1000000, 21, [n_ph](RandomStream& r) {
            return std::log(double(sample_photon_count(r, n_ph, PhotonStatistics{})) / n_ph);
        });
        CHECK(std::abs(summarize(x).var * n_ph - 1.0) < 0.01);
    }
}

TEST_CASE("signal with both noise sources off is exact") {
    TrialConfig c = small_config(50, 200.0);
    c.n_ph_mean = 1e4;
    c.stats.mandel_Q = -1.0;
    AtomicModel m = default_model();
    m.gas = cs_gas(1e-30);
    const auto s = run_trials(c, m);
    const double expected =
        kPrefactor * m.gas.density_n / constants::epsilon0 * weak_probe_alpha(m.levels, 0.0).alpha_i;
    for (const auto& v : s) {
        CHECK(v.S == doctest::Approx(expected).epsilon(1e-12));
        CHECK(v.photon_term == 0.0);
    }
}

TEST_CASE("reference run: mean, variance, Gaussianity and independence") {
    const auto& run = reference_run();
    const double V_I = quadrature_V_I();
    std::vector<double> S, atomic, photon;
    for (const auto& v : run) {
        S.push_back(v.S);
        atomic.push_back(v.atomic_term);
        photon.push_back(v.photon_term);
    }
    const auto chi = chi_i_samples(run, kPrefactor);
    const Summary c = summarize(chi);
    const Summary s = summarize(S);

    // Sample mean of chi against the quadrature ensemble average.
    CHECK(std::abs(c.mean - quadrature_mean_chi_i()) < 3.0 * c.se_mean);
    // Var(chi) N scales to the intrinsic variance.
    CHECK(c.var * 1e4 == doctest::Approx(V_I).epsilon(0.05));
    // Mean signal and the analytic variance a^2 V_I / N_at + 1 / N_ph.
    CHECK(std::abs(s.mean - kPrefactor * c.mean) < 3.0 * s.se_mean);
    CHECK(s.var == doctest::Approx(kPrefactor * kPrefactor * V_I / 1e4 + 1.0 / 1e6).epsilon(0.05));

    const SampleMoments shape = sample_moments(chi);
    CHECK(std::abs(shape.skewness) < 0.1);
    CHECK(std::abs(shape.excess_kurtosis) < 0.2);

    const Covariance cov = sample_covariance(atomic, photon);
    CHECK(std::abs(cov.value) < 3.0 * cov.standard_error);
}

TEST_CASE("sample-mean variance scales as 1/N_at") {
    const double V_I = quadrature_V_I();
    std::vector<double> n_values = {100.0, 316.0, 1000.0}, variances;
    for (double n : n_values) {
        const auto chi = chi_i_samples(run_trials(small_config(20000, n), default_model()), kPrefactor);
        const double var = summarize(chi).var;
        variances.push_back(var);
        CHECK(var * n == doctest::Approx(V_I).epsilon(0.05));
    }
    CHECK(log_log_slope(n_values, variances) == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("estimate_variance") {
    const std::vector<double> flat = {1.0, 1.0, 1.0};
    const VarianceEstimate d = estimate_variance(flat);
    CHECK(d.var_S == 0.0);
    CHECK(d.degenerate);
    CHECK(d.ci_low == 0.0);
    CHECK(d.ci_high == 0.0);

    auto normal = [](RandomStream& r) { return std::normal_distribution<double>(0.0, 1.0)(r); };
    const auto x = draws(100000, 31, normal);
    const VarianceEstimate e = estimate_variance(x);
    CHECK(e.ci_low <= 1.0);
    CHECK(e.ci_high >= 1.0);
    CHECK(e.ci_low <= e.var_S);
    CHECK(e.var_S <= e.ci_high);

    const VarianceEstimate small = estimate_variance(draws(10000, 32, normal));
    const VarianceEstimate large = estimate_variance(draws(40000, 33, normal));
    const double ratio = (small.ci_high - small.ci_low) / (large.ci_high - large.ci_low);
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.2));

    const VarianceEstimate jack = estimate_variance(draws(500, 34, normal));
    CHECK(jack.ci_low < jack.var_S);
    CHECK(jack.var_S < jack.ci_high);

    const std::vector<double> one = {1.0};
    CHECK_THROWS_AS(estimate_variance(one), DomainError);
}

TEST_CASE("trials are reproducible and independent of the worker count") {
    const TrialConfig c = small_config(400, 300.0);
    const auto serial = run_trials(c, default_model(), 1);
    const auto parallel = run_trials(c, default_model(), 3);
    const auto again = run_trials(c, default_model(), 1);
    REQUIRE(serial.size() == parallel.size());
    bool other_domain_differs = false;
    const auto other = run_trials(c, default_model(), 1, 1);
    for (std::size_t t = 0; t < serial.size(); ++t) {
        CHECK(serial[t].S == parallel[t].S);
        CHECK(serial[t].S == again[t].S);
        other_domain_differs = other_domain_differs || other[t].S != serial[t].S;
    }
    CHECK(other_domain_differs);
}

TEST_CASE("trial configuration invariants") {
    TrialConfig c = small_config(1, 10.0);
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = small_config(10, 10.0);
    c.n_ph_mean = 100.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.linearized_comparison = false;
    CHECK_NOTHROW(c.validate());
    c.n_at_mean = 0.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("tiny atom numbers are resampled and counted") {
    TrialConfig c = small_config(2000, 0.5);
    const auto s = run_trials(c, default_model());
    int resamples = 0;
    for (const auto& v : s) resamples += v.atom_resamples;
    CHECK(resamples > 0);
}

TEST_CASE("scaling validation without granularity noise sits at the shot-noise limit") {
    AtomicModel m = default_model();
    m.gas = cs_gas(1e-30);
    TrialConfig c = small_config(5000, 100.0);
    const ScalingReport r = validate_scaling({10.0, 100.0, 1000.0}, c, m, 0.0);
    CHECK(r.passed);
    for (const auto& row : r.rows) {
        CHECK(row.analytic_ratio == 1.0);
        CHECK(row.ci_low <= 1.0);
        CHECK(row.ci_high >= 1.0);
    }
}

TEST_CASE("scaling validation across the critical threshold") {
    // Choose a so that J = a^2 V_I = 0.3 and R_c = 3.3 falls inside the grid.
    const double J = 0.3;
    const AtomicModel m = default_model(std::sqrt(J / quadrature_V_I()));
    const std::vector<double> R = {1.0, 3.0, 10.0, 30.0, 100.0};
    TrialConfig c = small_config(10000, 1000.0);

    const ScalingReport classical = validate_scaling(R, c, m, J);
    CHECK(classical.passed);
    for (const auto& row : classical.rows) CHECK(row.deviation < 0.05);

    c.stats.mandel_Q = -1.0;
    const ScalingReport fock = validate_scaling(R, c, m, J);
    CHECK(fock.passed);
    for (const auto& row : fock.rows) CHECK(row.analytic_ratio == doctest::Approx(std::sqrt(row.R * J)));

    c.stats.mandel_Q = 0.0;
    ScalingValidationOptions wrong;
    wrong.analytic_J_scale = 2.0;
    CHECK_FALSE(validate_scaling(R, c, m, J, wrong).passed);
}
