#include "granoise/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "granoise/constants.hpp"
#include "granoise/errors.hpp"
#include "granoise/parallel.hpp"
#include "granoise/rng.hpp"

namespace granoise {

namespace {

constexpr int kResampleCap = 1000;

double t_quantile_975(std::size_t dof) {
    boost::math::students_t_distribution<double> t(static_cast<double>(dof));
    return boost::math::quantile(boost::math::complement(t, 0.025));
}

double unbiased_variance(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return ss / (n - 1.0);
}

}  // namespace

std::string_view to_string(PhotonReference r) { return r == PhotonReference::incident ? "incident" : "transmitted"; }

PhotonReference photon_reference_from_string(std::string_view s) {
    if (s == "incident") return PhotonReference::incident;
    if (s == "transmitted") return PhotonReference::transmitted;
    throw ConfigError("unknown photon reference '" + std::string(s) + "' (expected incident|transmitted)");
}

void TrialConfig::validate() const {
    if (trials < 2) throw DomainError("trial config: trials must be >= 2");
    if (!(n_at_mean > 0.0) || !(n_ph_mean > 0.0)) throw DomainError("trial config: mean counts must be > 0");
    if (linearized_comparison && n_ph_mean < 1e3)
        throw DomainError("trial config: n_ph_mean must be >= 1e3 for the linearized comparison");
    stats.validate();
}

std::int64_t sample_atom_number(RandomStream& rng, double n_at_mean) {
    if (!(n_at_mean > 0.0)) throw DomainError("sample_atom_number: mean must be > 0");
    std::poisson_distribution<std::int64_t> dist(n_at_mean);
    return dist(rng);
}

std::complex<double> sample_chi_bar(RandomStream& rng, std::int64_t n_atoms, const FourLevelParams& levels,
                                    const GasParams& gas, ResponseMode mode, const SteadyStateOptions& steady_state) {
    if (n_atoms <= 0) throw EmptyVolumeError("sample_chi_bar: no atoms in the probe volume");
    const double sigma_v = velocity_distribution(gas).sigma_v;
    std::normal_distribution<double> velocity(0.0, sigma_v);
    std::complex<double> sum{0.0, 0.0};
    if (mode == ResponseMode::weak_probe || levels.omega_p_rabi == 0.0) {
        const WeakProbeKernel kernel(levels);
        for (std::int64_t k = 0; k < n_atoms; ++k) sum += kernel(velocity(rng));
    } else {
        for (std::int64_t k = 0; k < n_atoms; ++k)
            sum += polarizability(levels, velocity(rng), ResponseMode::full, steady_state).value();
    }
    return (gas.density_n / constants::epsilon0) * sum / static_cast<double>(n_atoms);
}

PhotonMoments achieved_photon_moments(double n_ph_mean, const PhotonStatistics& stats) {
    stats.validate();
    switch (stats.resolved_sampler()) {
        case PhotonSampler::binomial: {
            const double p = -stats.mandel_Q;
            const double trials = std::max(1.0, std::round(n_ph_mean / p));
            return {trials * p, -p};
        }
        case PhotonSampler::deterministic: return {std::round(n_ph_mean), -1.0};
        default: return {n_ph_mean, stats.mandel_Q};
    }
}

std::int64_t sample_photon_count(RandomStream& rng, double n_ph_mean, const PhotonStatistics& stats) {
    if (!(stats.mandel_Q >= -1.0)) throw DomainError("sample_photon_count: Mandel Q must be >= -1");
    stats.validate();
    if (!(n_ph_mean > 0.0)) throw DomainError("sample_photon_count: mean must be > 0");
    switch (stats.resolved_sampler()) {
        case PhotonSampler::poisson: {
            std::poisson_distribution<std::int64_t> dist(n_ph_mean);
            return dist(rng);
        }
        case PhotonSampler::binomial: {
            // Var = M p (1 - p) = mean (1 + Q) with p = -Q.
            const double p = -stats.mandel_Q;
            const auto trials = static_cast<std::int64_t>(std::max(1.0, std::round(n_ph_mean / p)));
            std::binomial_distribution<std::int64_t> dist(trials, p);
            return dist(rng);
        }
        case PhotonSampler::negative_binomial: {
            // Gamma-Poisson mixture with shape r = mean / Q: Var = mean + mean^2 / r.
            const double r = n_ph_mean / stats.mandel_Q;
            std::gamma_distribution<double> rate(r, stats.mandel_Q);
            const double lambda = rate(rng);
            if (lambda <= 0.0) return 0;
            std::poisson_distribution<std::int64_t> dist(lambda);
            return dist(rng);
        }
        case PhotonSampler::deterministic: return static_cast<std::int64_t>(std::round(n_ph_mean));
        case PhotonSampler::automatic: break;
    }
    throw DomainError("sample_photon_count: unresolved sampler");
}

SignalSample simulate_signal(RandomStream& rng, const TrialConfig& config, const AtomicModel& model) {
    SignalSample out;
    std::int64_t n_atoms = sample_atom_number(rng, config.n_at_mean);
    while (n_atoms == 0) {
        if (++out.atom_resamples > kResampleCap)
            throw Error("simulate_signal: probe volume empty after 1000 redraws (n_at_mean too small)");
        n_atoms = sample_atom_number(rng, config.n_at_mean);
    }
    const std::complex<double> chi =
        sample_chi_bar(rng, n_atoms, model.levels, model.gas, config.mode, model.steady_state);
    out.atomic_term = model.a_prefactor * chi.imag();

    const double photon_mean = config.reference == PhotonReference::incident
                                   ? config.n_ph_mean
                                   : config.n_ph_mean * std::exp(-out.atomic_term);
    std::int64_t xi = photon_mean > 0.0 ? sample_photon_count(rng, photon_mean, config.stats) : 0;
    while (xi == 0) {
        if (++out.photon_resamples > kResampleCap)
            throw Error("simulate_signal: zero photon count after 1000 redraws (operating point too dim)");
        xi = sample_photon_count(rng, photon_mean, config.stats);
    }
    const double log_ratio = std::log(static_cast<double>(xi) / config.n_ph_mean);
    out.S = config.reference == PhotonReference::incident ? out.atomic_term - log_ratio : -log_ratio;
    out.photon_term = out.S - out.atomic_term;
    return out;
}

std::vector<SignalSample> run_trials(const TrialConfig& config, const AtomicModel& model, unsigned threads,
                                     std::uint64_t domain) {
    config.validate();
    model.levels.validate();
    model.gas.validate();
    const SubstreamFactory streams(config.seed);
    std::vector<SignalSample> samples(config.trials);
    parallel_for(config.trials, threads, [&](std::size_t t) {
        RandomStream rng = streams.stream(t, domain);
        samples[t] = simulate_signal(rng, config, model);
    });
    return samples;
}

VarianceEstimate estimate_variance(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw DomainError("estimate_variance: need at least 2 samples");
    VarianceEstimate est;
    est.n_effective = n;
    est.mean_S = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
    est.var_S = std::max(0.0, unbiased_variance(samples));
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    if (*lo == *hi) {
        est.var_S = 0.0;
        est.degenerate = true;
        return est;
    }

    double half_width = std::numeric_limits<double>::infinity();
    if (n >= 1000) {
        const std::size_t batches = std::max<std::size_t>(20, static_cast<std::size_t>(std::sqrt(double(n))));
        const std::size_t size = n / batches;
        std::vector<double> batch_vars(batches);
        for (std::size_t b = 0; b < batches; ++b) batch_vars[b] = unbiased_variance(samples.subspan(b * size, size));
        const double se = std::sqrt(unbiased_variance(batch_vars) / static_cast<double>(batches));
        half_width = t_quantile_975(batches - 1) * se;
    } else if (n >= 3) {
        // Leave-one-out variances from running sums.
        double s1 = 0.0, s2 = 0.0;
        for (double x : samples) {
            s1 += x;
            s2 += x * x;
        }
        const double m = static_cast<double>(n);
        std::vector<double> loo(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double a1 = s1 - samples[i];
            const double a2 = s2 - samples[i] * samples[i];
            loo[i] = (a2 - a1 * a1 / (m - 1.0)) / (m - 2.0);
        }
        const double loo_mean = std::accumulate(loo.begin(), loo.end(), 0.0) / m;
        double ss = 0.0;
        for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
        half_width = t_quantile_975(n - 1) * std::sqrt((m - 1.0) / m * ss);
    }
    est.ci_low = std::max(0.0, est.var_S - half_width);
    est.ci_high = est.var_S + half_width;
    return est;
}

SampleMoments sample_moments(std::span<const double> samples) {
    const double n = static_cast<double>(samples.size());
    if (samples.size() < 4) throw DomainError("sample_moments: need at least 4 samples");
    SampleMoments m;
    m.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : samples) {
        const double d = x - m.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    m.variance = m2 * n / (n - 1.0);
    m.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    m.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
    return m;
}

Covariance sample_covariance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3) throw DomainError("sample_covariance: need matched samples, n >= 3");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    std::vector<double> products(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) products[i] = (x[i] - mx) * (y[i] - my);
    Covariance c;
    c.value = std::accumulate(products.begin(), products.end(), 0.0) / (n - 1.0);
    c.standard_error = std::sqrt(unbiased_variance(products) / n);
    return c;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("log_log_slope: need >= 2 matched points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ScalingReport validate_scaling(const std::vector<double>& R_values, const TrialConfig& base, const AtomicModel& model,
                               double J, const ScalingValidationOptions& options) {
    if (R_values.empty()) throw DomainError("validate_scaling: empty R grid");
    if (!(J >= 0.0)) throw DomainError("validate_scaling: J must be >= 0");
    ScalingReport report;
    report.J = J;
    const double J_analytic = J * options.analytic_J_scale;
    for (std::size_t k = 0; k < R_values.size(); ++k) {
        const double R = R_values[k];
        if (!(R > 0.0)) throw DomainError("validate_scaling: R values must be > 0");
        TrialConfig config = base;
        config.n_ph_mean = R * base.n_at_mean;
        const std::vector<SignalSample> samples = run_trials(config, model, options.threads, k);
        std::vector<double> s(samples.size());
        ScalingRow row;
        for (std::size_t t = 0; t < samples.size(); ++t) {
            s[t] = samples[t].S;
            row.atom_resamples += samples[t].atom_resamples;
            row.photon_resamples += samples[t].photon_resamples;
        }
        const VarianceEstimate est = estimate_variance(s);
        const PhotonMoments achieved = achieved_photon_moments(config.n_ph_mean, config.stats);
        const double shot = 1.0 / std::sqrt(achieved.mean);

        row.R = R;
        row.n_at_mean = config.n_at_mean;
        row.n_ph_mean = achieved.mean;
        row.achieved_Q = achieved.mandel_Q;
        row.empirical_ratio = std::sqrt(est.var_S) / shot;
        row.ci_low = std::sqrt(est.ci_low) / shot;
        row.ci_high = std::sqrt(est.ci_high) / shot;
        const double R_achieved = achieved.mean / config.n_at_mean;
        row.analytic_ratio = std::sqrt((1.0 + achieved.mandel_Q) + R_achieved * J_analytic);
        row.deviation = row.analytic_ratio > 0.0 ? row.empirical_ratio / row.analytic_ratio - 1.0
                                                 : std::numeric_limits<double>::infinity();
        row.pass = std::abs(row.deviation) < options.tolerance && row.analytic_ratio >= row.ci_low &&
                   row.analytic_ratio <= row.ci_high;
        report.rows.push_back(row);
    }
    std::vector<double> xs, ys;
    for (const auto& row : report.rows)
        if (row.R * J >= 10.0) {
            xs.push_back(row.R);
            ys.push_back(row.empirical_ratio);
        }
    if (xs.size() >= 2) report.agn_slope = log_log_slope(xs, ys);
    report.passed = std::all_of(report.rows.begin(), report.rows.end(), [](const ScalingRow& r) { return r.pass; });
    return report;
}

}  // namespace granoise
