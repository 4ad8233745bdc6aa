#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "granoise/spectroscopy.hpp"

namespace granoise {

struct GasParams {
    double density_n = 0.0;      // m^-3
    double temperature_T = 0.0;  // K
    double mass_m = 0.0;         // kg

    void validate() const;
};

struct VelocityDistribution {
    double sigma_v = 0.0;  // 1D standard deviation sqrt(kT/m)
    double v_bar = 0.0;    // 3D mean speed sqrt(8kT/(pi m))
};

VelocityDistribution velocity_distribution(const GasParams& gas);

enum class QuadratureMethod {
    /// Gauss-Hermite with order doubling. Exact Gaussian weighting; only
    /// converges when the homogeneous linewidth is comparable to the Doppler width.
    gauss_hermite,
    /// Globally adaptive Gauss-Kronrod (7/15) over +-z_max standard deviations,
    /// with the initial partition refined around every Doppler resonance.
    adaptive,
};

std::string_view to_string(QuadratureMethod m);
QuadratureMethod quadrature_method_from_string(std::string_view s);

struct QuadratureOptions {
    QuadratureMethod method = QuadratureMethod::adaptive;
    double rel_tol = 1e-6;
    int initial_order = 8;
    int max_order = 512;
    std::size_t max_intervals = 4000;
    double z_max = 8.5;
    SteadyStateOptions steady_state{};
};

/// Fixed velocity rule: sum_k weight_k f(velocity_k) approximates E_v[f].
struct VelocityRule {
    std::vector<double> velocities;
    std::vector<double> weights;

    std::size_t size() const { return velocities.size(); }
};

struct AlphaMoments {
    Polarizability mean_alpha;
    double var_alpha_r = 0.0;
    double var_alpha_i = 0.0;
    /// Number of velocity nodes in the accepted rule.
    int quadrature_order = 0;
    bool clamped_r = false;
    bool clamped_i = false;
};

struct MomentsResult {
    AlphaMoments moments;
    /// Final rule; reusing it keeps nearby evaluations on identical nodes.
    VelocityRule rule;
};

/// Moments of alpha over the 1D Maxwell-Boltzmann distribution, refined until
/// two successive rules agree on first and second moments to rel_tol.
MomentsResult alpha_moments_with_rule(const FourLevelParams& params, const GasParams& gas,
                                      ResponseMode mode, const QuadratureOptions& options = {});

AlphaMoments alpha_moments(const FourLevelParams& params, const GasParams& gas, ResponseMode mode,
                           const QuadratureOptions& options = {});

/// Evaluates the moments on a fixed rule (no refinement).
AlphaMoments moments_on_rule(const FourLevelParams& params, const VelocityRule& rule,
                             ResponseMode mode, const SteadyStateOptions& options = {});

/// Gauss-Hermite rule of the given order for a zero-mean Gaussian of width sigma_v.
VelocityRule gauss_hermite_rule(int order, double sigma_v);

/// V_q = (n / eps0)^2 Var_u[alpha_q].
double intrinsic_variance(const GasParams& gas, double var_alpha_q);

/// J = a^2 V_I for optical-depth readout.
double fluctuation_parameter(double a_prefactor, double intrinsic_variance_i);

/// General transduction form J = G^2 V_q / nu^2.
double fluctuation_parameter(double transduction_G, double intrinsic_variance_q, double nu);

}  // namespace granoise
