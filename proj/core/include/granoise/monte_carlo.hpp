#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "granoise/ensemble_stats.hpp"
#include "granoise/noise_scaling.hpp"
#include "granoise/spectroscopy.hpp"

namespace granoise {

using RandomStream = std::mt19937_64;

/// What the photon count xi is referenced to in the optical-depth readout.
enum class PhotonReference {
    incident,     // xi has mean N_ph, as in S = a chi_I - ln(xi / N_ph)
    transmitted,  // exploration only: xi has mean N_ph exp(-a chi_I), S = -ln(xi / N_ph)
};

std::string_view to_string(PhotonReference r);
PhotonReference photon_reference_from_string(std::string_view s);

struct TrialConfig {
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    double n_at_mean = 0.0;
    double n_ph_mean = 0.0;
    PhotonStatistics stats;
    /// Per-atom response. Full mode solves the steady state for every drawn
    /// velocity (roughly 5 us per atom): keep trials * n_at_mean below ~1e7.
    ResponseMode mode = ResponseMode::weak_probe;
    PhotonReference reference = PhotonReference::incident;
    /// Enforces n_ph_mean >= 1e3 so the log can be linearized.
    bool linearized_comparison = true;

    void validate() const;
};

/// Per-atom physics shared by all trials.
struct AtomicModel {
    FourLevelParams levels;
    GasParams gas;
    double a_prefactor = 0.0;
    SteadyStateOptions steady_state{};
};

std::int64_t sample_atom_number(RandomStream& rng, double n_at_mean);

/// (n / eps0) (1/N) sum_i alpha(v_i) with v_i ~ Normal(0, sigma_v^2).
std::complex<double> sample_chi_bar(RandomStream& rng, std::int64_t n_atoms, const FourLevelParams& levels,
                                    const GasParams& gas, ResponseMode mode,
                                    const SteadyStateOptions& steady_state = {});

std::int64_t sample_photon_count(RandomStream& rng, double n_ph_mean, const PhotonStatistics& stats);

/// Mean and Mandel Q actually realized by the sampler for a target mean
/// (binomial trial-count rounding and deterministic rounding shift them).
struct PhotonMoments {
    double mean = 0.0;
    double mandel_Q = 0.0;
};

PhotonMoments achieved_photon_moments(double n_ph_mean, const PhotonStatistics& stats);

struct SignalSample {
    double S = 0.0;
    double atomic_term = 0.0;  // a chi_I
    double photon_term = 0.0;  // S - a chi_I
    int atom_resamples = 0;
    int photon_resamples = 0;
};

SignalSample simulate_signal(RandomStream& rng, const TrialConfig& config, const AtomicModel& model);

/// Runs config.trials independent trials; trial t uses substream (seed, domain, t).
std::vector<SignalSample> run_trials(const TrialConfig& config, const AtomicModel& model, unsigned threads = 1,
                                     std::uint64_t domain = 0);

struct VarianceEstimate {
    double mean_S = 0.0;
    double var_S = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n_effective = 0;
    /// All samples equal; the interval collapses to zero.
    bool degenerate = false;
};

/// Unbiased sample variance with a 95% interval from 20 batch means
/// (jackknife below 1000 samples), using Student-t quantiles.
VarianceEstimate estimate_variance(std::span<const double> samples);

struct SampleMoments {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

SampleMoments sample_moments(std::span<const double> samples);

struct Covariance {
    double value = 0.0;
    double standard_error = 0.0;
};

Covariance sample_covariance(std::span<const double> x, std::span<const double> y);

struct ScalingValidationOptions {
    double tolerance = 0.05;
    /// Multiplies the analytic J; anything other than 1 is a harness self-test.
    double analytic_J_scale = 1.0;
    unsigned threads = 1;
};

struct ScalingRow {
    double R = 0.0;
    double n_at_mean = 0.0;
    double n_ph_mean = 0.0;
    double achieved_Q = 0.0;
    double empirical_ratio = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double analytic_ratio = 0.0;
    double deviation = 0.0;
    bool pass = false;
    int atom_resamples = 0;
    int photon_resamples = 0;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    double J = 0.0;
    /// Least-squares slope of log ratio vs log R over points with R J >= 10.
    std::optional<double> agn_slope;
    bool passed = false;
};

/// Empirical sigma_S / sigma_S^(0) against sqrt((1 + Q) + R J) at each R, with
/// n_ph = R * n_at_mean per point. Point k draws from substream domain k.
ScalingReport validate_scaling(const std::vector<double>& R_values, const TrialConfig& base,
                               const AtomicModel& model, double J, const ScalingValidationOptions& options = {});

double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace granoise
