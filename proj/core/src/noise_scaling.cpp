#include "granoise/noise_scaling.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "granoise/constants.hpp"
#include "granoise/errors.hpp"
#include "granoise/parallel.hpp"

namespace granoise {

namespace {

// Relative size of S0 differences that fixed-node rounding can produce.
constexpr double kSignalResolution = 1e-12;

double alpha_component(const AlphaMoments& m, Quadrature q) {
    return q == Quadrature::I ? m.mean_alpha.alpha_i : m.mean_alpha.alpha_r;
}

double variance_component(const AlphaMoments& m, Quadrature q) {
    return q == Quadrature::I ? m.var_alpha_i : m.var_alpha_r;
}

double mean_signal(const OperatingPoint& op, const AlphaMoments& m) {
    return op.readout.G_for(op.geometry) * op.gas.density_n / constants::epsilon0 *
           alpha_component(m, op.readout.quadrature_q);
}

SignalPoint signal_from_moments(const OperatingPoint& op, const AlphaMoments& m) {
    SignalPoint sp;
    sp.moments = m;
    sp.S0 = mean_signal(op, m);
    sp.V_I = intrinsic_variance(op.gas, variance_component(m, op.readout.quadrature_q));
    sp.J = fluctuation_parameter(op.readout.G_for(op.geometry), sp.V_I, op.readout.photon_transduction_nu);
    return sp;
}

struct SlopeAndPoint {
    SlopeResult slope;
    SignalPoint point;
};

SlopeAndPoint slope_and_point(const OperatingPoint& op, std::optional<double> step) {
    op.validate();
    const FourLevelParams levels = op.levels_at_power();
    const MomentsResult center = alpha_moments_with_rule(levels, op.gas, op.mode, op.quadrature);
    SlopeAndPoint out;
    out.point = signal_from_moments(op, center.moments);

    const double h = step.value_or(default_slope_step(levels.omega_s_rabi));
    if (!(h > 0.0)) throw DomainError("signal_slope: step must be > 0");

    // S0 depends on Omega_s only through Omega_s^2, so negative arguments fold back.
    auto s_at = [&](double omega_s) {
        FourLevelParams shifted = levels;
        shifted.omega_s_rabi = std::abs(omega_s);
        return mean_signal(op, moments_on_rule(shifted, center.rule, op.mode, op.quadrature.steady_state));
    };
    const double w = levels.omega_s_rabi;
    const double d_h = (s_at(w + h) - s_at(w - h)) / (2.0 * h);
    const double d_half = (s_at(w + 0.5 * h) - s_at(w - 0.5 * h)) / h;
    out.slope.slope = d_half + (d_half - d_h) / 3.0;
    out.slope.error = std::abs(d_half - d_h) / 3.0;
    out.slope.step = h;
    out.slope.S0 = out.point.S0;

    const double floor = kSignalResolution * std::abs(out.point.S0) / h;
    if (!(std::abs(out.slope.slope) > std::max(3.0 * out.slope.error, floor))) {
        std::ostringstream msg;
        msg << "signal_slope: slope " << out.slope.slope << " not resolved (error " << out.slope.error
            << ", floor " << floor << "); operating point unusable for slope detection";
        throw FlatSlopeError(msg.str());
    }
    return out;
}

}  // namespace

double ReadoutModel::G_for(const BeamGeometry& geom) const {
    return transduction_G ? *transduction_G : optical_depth_prefactor(geom);
}

void ReadoutModel::validate() const {
    if (photon_transduction_nu == 0.0 || !std::isfinite(photon_transduction_nu))
        throw DomainError("photon transduction nu must be finite and nonzero");
    if (transduction_G && !std::isfinite(*transduction_G)) throw DomainError("transduction G must be finite");
}

std::string_view to_string(PhotonSampler s) {
    switch (s) {
        case PhotonSampler::automatic: return "auto";
        case PhotonSampler::poisson: return "poisson";
        case PhotonSampler::binomial: return "binomial";
        case PhotonSampler::negative_binomial: return "negative-binomial";
        case PhotonSampler::deterministic: return "deterministic";
    }
    return "auto";
}

PhotonSampler photon_sampler_from_string(std::string_view s) {
    if (s == "auto") return PhotonSampler::automatic;
    if (s == "poisson") return PhotonSampler::poisson;
    if (s == "binomial") return PhotonSampler::binomial;
    if (s == "negative-binomial") return PhotonSampler::negative_binomial;
    if (s == "deterministic") return PhotonSampler::deterministic;
    throw ConfigError("unknown photon sampler '" + std::string(s) +
                      "' (expected auto|poisson|binomial|negative-binomial|deterministic)");
}

PhotonSampler PhotonStatistics::resolved_sampler() const {
    if (sampler != PhotonSampler::automatic) return sampler;
    if (mandel_Q == 0.0) return PhotonSampler::poisson;
    if (mandel_Q == -1.0) return PhotonSampler::deterministic;
    return mandel_Q < 0.0 ? PhotonSampler::binomial : PhotonSampler::negative_binomial;
}

void PhotonStatistics::validate() const {
    if (!(mandel_Q >= -1.0) || !std::isfinite(mandel_Q)) throw DomainError("Mandel Q must be >= -1");
    const PhotonSampler s = resolved_sampler();
    const bool ok = (s == PhotonSampler::poisson && mandel_Q == 0.0) ||
                    (s == PhotonSampler::deterministic && mandel_Q == -1.0) ||
                    (s == PhotonSampler::binomial && mandel_Q > -1.0 && mandel_Q < 0.0) ||
                    (s == PhotonSampler::negative_binomial && mandel_Q > 0.0);
    if (!ok) throw DomainError("photon sampler '" + std::string(to_string(s)) + "' inconsistent with Mandel Q");
}

double signal_variance(double G, double V_q, double n_at, double nu, double n_ph) {
    if (!(n_at > 0.0) || !(n_ph > 0.0)) throw DomainError("signal_variance: counts must be > 0");
    if (V_q < 0.0) throw DomainError("signal_variance: intrinsic variance must be >= 0");
    return G * G * V_q / n_at + nu * nu / n_ph;
}

NoiseBudget noise_budget(double G, double V_q, double n_at, double nu, double n_ph, double mandel_Q) {
    if (!(n_at > 0.0) || !(n_ph > 0.0)) throw DomainError("noise_budget: counts must be > 0");
    if (V_q < 0.0) throw DomainError("noise_budget: intrinsic variance must be >= 0");
    if (!(mandel_Q >= -1.0)) throw DomainError("noise_budget: Mandel Q must be >= -1");
    if (nu == 0.0) throw DomainError("noise_budget: nu must be nonzero");
    NoiseBudget b;
    const double agn2 = G * G * V_q / n_at;
    const double omn2 = nu * nu * (1.0 + mandel_Q) / n_ph;
    b.sigma_agn = std::sqrt(agn2);
    b.sigma_omn = std::sqrt(omn2);
    b.sigma_total = std::sqrt(agn2 + omn2);
    b.ratio_to_shot_limit = b.sigma_total / (std::abs(nu) / std::sqrt(n_ph));
    b.R = n_ph / n_at;
    b.J = G * G * V_q / (nu * nu);
    b.J_Q = mandel_Q == -1.0 ? std::numeric_limits<double>::infinity() : b.J / (1.0 + mandel_Q);
    return b;
}

double scaling_ratio(double R, double J) {
    if (!(R >= 0.0) || !(J >= 0.0)) throw DomainError("scaling_ratio: R and J must be >= 0");
    return std::sqrt(1.0 + R * J);
}

GeneralizedRatio generalized_scaling_ratio(double R, double J, const PhotonStatistics& stats) {
    if (!(stats.mandel_Q >= -1.0)) throw DomainError("generalized_scaling_ratio: Mandel Q must be >= -1");
    if (!(R >= 0.0) || !(J >= 0.0)) throw DomainError("generalized_scaling_ratio: R and J must be >= 0");
    const double q1 = 1.0 + stats.mandel_Q;
    GeneralizedRatio out;
    out.relative_to_shot_limit = std::sqrt(q1 + R * J);
    if (q1 > 0.0) out.relative_to_quantum_limit = std::sqrt(1.0 + R * J / q1);
    return out;
}

double critical_threshold(double J) {
    if (!(J >= 0.0)) throw DomainError("critical_threshold: J must be >= 0");
    if (J == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / J;
}

double quantum_advantage_boundary(const std::function<double(double)>& J_of_R, double R_low, double R_high,
                                  double rel_tol) {
    if (!(R_low >= 0.0) || !(R_high > R_low)) throw DomainError("quantum_advantage_boundary: need 0 <= R_low < R_high");
    auto g = [&](double R) { return R * J_of_R(R) - 1.0; };
    double lo = R_low, hi = R_high;
    double g_lo = g(lo), g_hi = g(hi);
    if (g_lo == 0.0) return lo;
    if (g_hi == 0.0) return hi;
    if ((g_lo > 0.0) == (g_hi > 0.0)) {
        std::ostringstream msg;
        msg << "quantum_advantage_boundary: R J(R) - 1 has no sign change on [" << lo << ", " << hi
            << "] (values " << g_lo << ", " << g_hi << ")";
        throw BracketError(msg.str(), g_lo, g_hi);
    }
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double g_mid = g(mid);
        if (g_mid == 0.0) return mid;
        if ((g_mid > 0.0) == (g_lo > 0.0)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

FourLevelParams OperatingPoint::levels_at_power() const {
    FourLevelParams l = levels;
    l.omega_p_rabi = probe_rabi_from_power(geometry, levels.mu12);
    return l;
}

void OperatingPoint::validate() const {
    gas.validate();
    geometry.validate();
    levels.validate();
    readout.validate();
    stats.validate();
    if (!(dt > 0.0)) throw DomainError("operating point: dt must be > 0");
}

JOfR::JOfR(OperatingPoint base) : base_(std::move(base)) {
    base_.validate();
    if (base_.mode == ResponseMode::weak_probe) constant_J_ = evaluate_signal(base_).J;
}

JOfR::JOfR(OperatingPoint base, VelocityRule frozen_rule) : base_(std::move(base)), rule_(std::move(frozen_rule)) {
    base_.validate();
    if (base_.mode == ResponseMode::weak_probe) constant_J_ = evaluate_signal(base_).J;
}

double JOfR::power_for(double R) const { return power_for_resource_ratio(base_.gas, base_.geometry, R); }

double JOfR::operator()(double R) const {
    if (constant_J_) return *constant_J_;
    OperatingPoint op = base_;
    op.geometry.power_in = power_for(R);
    if (!rule_) return evaluate_signal(op).J;
    const AlphaMoments m = moments_on_rule(op.levels_at_power(), *rule_, op.mode, op.quadrature.steady_state);
    return signal_from_moments(op, m).J;
}

JOfR JOfR::frozen_at(double R_ref, double rel_tol) const {
    if (constant_J_) return *this;
    OperatingPoint op = base_;
    op.geometry.power_in = power_for(R_ref);
    QuadratureOptions q = op.quadrature;
    q.rel_tol = rel_tol;
    MomentsResult mr = alpha_moments_with_rule(op.levels_at_power(), op.gas, op.mode, q);
    return JOfR(base_, std::move(mr.rule));
}

double quantum_advantage_boundary(const JOfR& J_of_R, double R_low, double R_high, double rel_tol) {
    auto as_function = [](const JOfR& j) { return std::function<double(double)>([&j](double R) { return j(R); }); };
    if (J_of_R.base().mode == ResponseMode::weak_probe)
        return quantum_advantage_boundary(as_function(J_of_R), R_low, R_high, rel_tol);

    const double coarse = quantum_advantage_boundary(as_function(J_of_R), R_low, R_high, 1e-6);
    const JOfR frozen = J_of_R.frozen_at(coarse);
    const auto f = as_function(frozen);
    for (double width : {1e-3, 1e-2, 1e-1}) {
        const double lo = std::max(R_low, coarse * (1.0 - width));
        const double hi = std::min(R_high, coarse * (1.0 + width));
        const double g_lo = lo * frozen(lo) - 1.0;
        const double g_hi = hi * frozen(hi) - 1.0;
        if ((g_lo > 0.0) != (g_hi > 0.0) || g_lo == 0.0 || g_hi == 0.0)
            return quantum_advantage_boundary(f, lo, hi, rel_tol);
    }
    return quantum_advantage_boundary(f, R_low, R_high, rel_tol);
}

SignalPoint evaluate_signal(const OperatingPoint& op) {
    op.validate();
    return signal_from_moments(op, alpha_moments(op.levels_at_power(), op.gas, op.mode, op.quadrature));
}

double default_slope_step(double omega_s) {
    return std::max(1e-4 * omega_s, constants::two_pi * 1e3);
}

SlopeResult signal_slope(const OperatingPoint& op, std::optional<double> step) {
    return slope_and_point(op, step).slope;
}

double SensitivityResult::log10_E_s() const { return std::log10(E_s); }

SensitivityResult sensitivity(const OperatingPoint& op) {
    const SlopeAndPoint sp = slope_and_point(op, std::nullopt);
    if (!(op.levels.mu_s > 0.0)) throw DomainError("sensitivity: microwave dipole mu_s must be > 0");

    SensitivityResult r;
    const double phi_ph = photon_flux(op.geometry);
    const double phi_at = atom_flux(op.gas, op.geometry);
    r.n_ph = phi_ph * op.dt;
    r.n_at_eff = phi_at * op.dt;
    r.slope = sp.slope.slope;
    r.slope_error = sp.slope.error;
    r.J = sp.point.J;
    r.R = phi_ph / phi_at;

    const double G = op.readout.G_for(op.geometry);
    const double nu = op.readout.photon_transduction_nu;
    const double q1 = 1.0 + op.stats.mandel_Q;
    const double prefactor = constants::hbar / op.levels.mu_s * std::sqrt(op.dt) / std::abs(r.slope);

    // Route 1: propagate the full variance budget.
    const double variance = G * G * sp.point.V_I / r.n_at_eff + nu * nu * q1 / r.n_ph;
    r.sigma_S = std::sqrt(variance);
    r.E_s = prefactor * r.sigma_S;

    // Route 2: shot-limited sensitivity times the scaling law.
    r.E_s_shot = prefactor * std::abs(nu) / std::sqrt(r.n_ph);
    const double ratio = generalized_scaling_ratio(r.R, r.J, op.stats).relative_to_shot_limit;
    r.identity_residual = std::abs(r.E_s / r.E_s_shot - ratio) / ratio;
    return r;
}

SensitivityMap sensitivity_map(const std::vector<double>& powers, const std::vector<double>& waists,
                               const OperatingPoint& op, unsigned threads) {
    if (powers.empty() || waists.empty()) throw DomainError("sensitivity_map: empty grid");
    SensitivityMap map;
    map.powers = powers;
    map.waists = waists;
    map.cells.resize(powers.size() * waists.size());
    parallel_for(map.cells.size(), threads, [&](std::size_t idx) {
        OperatingPoint point = op;
        point.geometry.power_in = powers[idx / waists.size()];
        point.geometry.waist_w0 = waists[idx % waists.size()];
        try {
            map.cells[idx] = sensitivity(point);
        } catch (const FlatSlopeError&) {
            map.cells[idx] = std::nullopt;
        }
    });
    bool any = false;
    for (const auto& c : map.cells) any = any || c.has_value();
    if (!any) throw Error("sensitivity_map: every grid point failed slope detection");
    return map;
}

}  // namespace granoise
