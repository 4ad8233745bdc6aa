#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "granoise/ensemble_stats.hpp"
#include "granoise/geometry_flux.hpp"
#include "granoise/spectroscopy.hpp"

namespace granoise {

enum class Quadrature { R, I };

/// Linearized readout S = S0 + G dchi_q + E. For optical depth G = a and nu = -1.
struct ReadoutModel {
    /// Unset means "use the optical-depth prefactor a of the geometry".
    std::optional<double> transduction_G;
    double photon_transduction_nu = -1.0;
    Quadrature quadrature_q = Quadrature::I;

    double G_for(const BeamGeometry& geom) const;
    void validate() const;
};

enum class PhotonSampler { automatic, poisson, binomial, negative_binomial, deterministic };

std::string_view to_string(PhotonSampler s);
PhotonSampler photon_sampler_from_string(std::string_view s);

/// Photon-count statistics, Var(xi) = N_ph (1 + Q).
struct PhotonStatistics {
    double mandel_Q = 0.0;
    PhotonSampler sampler = PhotonSampler::automatic;

    /// Sampler implied by Q when `sampler` is automatic.
    PhotonSampler resolved_sampler() const;
    void validate() const;
};

struct NoiseBudget {
    double sigma_agn = 0.0;
    double sigma_omn = 0.0;
    double sigma_total = 0.0;
    /// sigma_total / sigma_S^(0), with sigma_S^(0) = |nu| / sqrt(N_ph) the shot-noise limit.
    double ratio_to_shot_limit = 0.0;
    double R = 0.0;
    double J = 0.0;
    /// J / (1 + Q); +inf for Fock light.
    double J_Q = 0.0;
};

/// G^2 V_q / N_at + nu^2 / N_ph.
double signal_variance(double G, double V_q, double n_at, double nu, double n_ph);

NoiseBudget noise_budget(double G, double V_q, double n_at, double nu, double n_ph, double mandel_Q = 0.0);

/// sqrt(1 + R J).
double scaling_ratio(double R, double J);

struct GeneralizedRatio {
    /// sigma_S / sigma_E^(Q) = sqrt(1 + R J / (1 + Q)); absent for Q = -1.
    std::optional<double> relative_to_quantum_limit;
    /// sigma_S / sigma_S^(0) = sqrt((1 + Q) + R J).
    double relative_to_shot_limit = 0.0;
};

GeneralizedRatio generalized_scaling_ratio(double R, double J, const PhotonStatistics& stats);

/// R_c = 1 / J; +inf when J = 0 (no granularity noise).
double critical_threshold(double J);

inline bool is_no_agn_threshold(double R_c) { return R_c == std::numeric_limits<double>::infinity(); }

/// Root of R J(R) = 1 on [R_low, R_high] by bisection to relative tolerance rel_tol.
double quantum_advantage_boundary(const std::function<double(double)>& J_of_R, double R_low, double R_high,
                                  double rel_tol = 1e-10);

/// Everything needed to evaluate the mean signal and its noise at one operating point.
struct OperatingPoint {
    GasParams gas;
    BeamGeometry geometry;
    FourLevelParams levels;
    ReadoutModel readout;
    PhotonStatistics stats;
    ResponseMode mode = ResponseMode::full;
    QuadratureOptions quadrature;
    /// Counting interval; equals the integration time of one reading.
    double dt = 1.0;

    /// Levels with the probe Rabi frequency set from the incident power.
    FourLevelParams levels_at_power() const;
    void validate() const;
};

/// J as a function of R at fixed gas and geometry: R -> P_in -> Omega_p -> moments.
///
/// Immutable after construction. In weak-probe mode J is constant and computed
/// once. With a frozen rule the velocity nodes are fixed, which makes J(R)
/// smooth for root finding.
class JOfR {
  public:
    explicit JOfR(OperatingPoint base);
    JOfR(OperatingPoint base, VelocityRule frozen_rule);

    double operator()(double R) const;
    double power_for(double R) const;
    const OperatingPoint& base() const { return base_; }

    /// Copy whose velocity rule is the adaptive rule at R_ref.
    JOfR frozen_at(double R_ref, double rel_tol = 1e-9) const;

  private:
    OperatingPoint base_;
    std::optional<VelocityRule> rule_;
    std::optional<double> constant_J_;
};

/// Two-stage boundary search for a response-dependent J(R): adaptive bisection,
/// then bisection again with velocity nodes frozen near the root.
double quantum_advantage_boundary(const JOfR& J_of_R, double R_low, double R_high, double rel_tol = 1e-10);

struct SignalPoint {
    double S0 = 0.0;      // a <chi_I>
    double V_I = 0.0;     // intrinsic variance of the readout quadrature
    double J = 0.0;
    AlphaMoments moments;
};

/// Mean signal and intrinsic variance at the operating point (adaptive quadrature).
SignalPoint evaluate_signal(const OperatingPoint& op);

struct SlopeResult {
    double slope = 0.0;  // dS0/dOmega_s, per rad/s
    double error = 0.0;  // Richardson error estimate
    double step = 0.0;
    double S0 = 0.0;
};

/// Default step max(1e-4 Omega_s, 2 pi x 1 kHz).
double default_slope_step(double omega_s);

/// Central difference of S0 in Omega_s with one Richardson extrapolation
/// (steps h and h/2). Throws FlatSlopeError when the slope is not resolved.
SlopeResult signal_slope(const OperatingPoint& op, std::optional<double> step = std::nullopt);

struct SensitivityResult {
    double E_s = 0.0;          // V m^-1 Hz^-1/2
    double E_s_shot = 0.0;     // shot-noise-limited counterpart
    double R = 0.0;
    double J = 0.0;
    double sigma_S = 0.0;
    double slope = 0.0;
    double slope_error = 0.0;
    double n_ph = 0.0;
    double n_at_eff = 0.0;
    /// |E_s / E_s_shot - ratio| / ratio, ratio from the generalized scaling law.
    double identity_residual = 0.0;

    double log10_E_s() const;
};

/// Slope-detection sensitivity in flux mode (N_ph = phi_ph dt, N_at = phi_at dt).
SensitivityResult sensitivity(const OperatingPoint& op);

struct SensitivityMap {
    std::vector<double> powers;
    std::vector<double> waists;
    /// Row-major over (power, waist); missing where slope detection failed.
    std::vector<std::optional<SensitivityResult>> cells;

    const std::optional<SensitivityResult>& at(std::size_t ip, std::size_t iw) const {
        return cells[ip * waists.size() + iw];
    }
};

SensitivityMap sensitivity_map(const std::vector<double>& powers, const std::vector<double>& waists,
                               const OperatingPoint& op, unsigned threads = 1);

}  // namespace granoise
