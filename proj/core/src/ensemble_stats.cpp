#include "granoise/ensemble_stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "granoise/constants.hpp"
#include "granoise/errors.hpp"

namespace granoise {

namespace {

using Vec4 = std::array<double, 4>;  // Re a, Im a, (Re a)^2, (Im a)^2 in units of alpha_ref

// QUADPACK qk15 abscissae and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * constants::pi); }

struct Interval {
    double a = 0.0;
    double b = 0.0;
    Vec4 kronrod{};
    Vec4 gauss{};
    Vec4 error{};
};

template <class F>
Interval integrate_interval(double a, double b, F&& f) {
    Interval out{a, b};
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto accumulate = [&](double z, double wk, double wg) {
        const Vec4 v = f(z);
        const double w = normal_pdf(z) * half;
        for (int c = 0; c < 4; ++c) {
            out.kronrod[c] += wk * w * v[c];
            out.gauss[c] += wg * w * v[c];
        }
    };
    accumulate(center, kWgk[7], kWg[3]);
    for (int j = 0; j < 7; ++j) {
        const double dz = half * kXgk[j];
        // Odd Kronrod indices coincide with the 7-point Gauss nodes.
        const double wg = (j % 2 == 1) ? kWg[j / 2] : 0.0;
        accumulate(center - dz, kWgk[j], wg);
        accumulate(center + dz, kWgk[j], wg);
    }
    for (int c = 0; c < 4; ++c) out.error[c] = std::abs(out.kronrod[c] - out.gauss[c]);
    return out;
}

void append_interval_rule(double a, double b, double sigma_v, VelocityRule& rule) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto push = [&](double z, double wk) {
        rule.velocities.push_back(sigma_v * z);
        rule.weights.push_back(wk * half * normal_pdf(z));
    };
    for (int j = 0; j < 7; ++j) push(center - half * kXgk[j], kWgk[j]);
    push(center, kWgk[7]);
    for (int j = 6; j >= 0; --j) push(center + half * kXgk[j], kWgk[j]);
}

// Resonant velocities and their homogeneous widths, in units of sigma_v.
std::vector<double> resonance_breakpoints(const FourLevelParams& p, double sigma_v, double z_max) {
    std::vector<std::pair<double, double>> features;  // (velocity, width)
    const double g21 = p.coherence_decay(2, 1) + 0.5 * p.omega_p_rabi;
    if (p.k_p != 0.0) {
        features.emplace_back(p.delta_p / p.k_p, g21 / std::abs(p.k_p));
        if (p.omega_c_rabi > 0.0) {
            features.emplace_back((p.delta_p + 0.5 * p.omega_c_rabi) / p.k_p, g21 / std::abs(p.k_p));
            features.emplace_back((p.delta_p - 0.5 * p.omega_c_rabi) / p.k_p, g21 / std::abs(p.k_p));
        }
    }
    const double k2 = p.k_p + p.k_c;
    if (k2 != 0.0 && p.omega_c_rabi > 0.0) {
        const double g31 = p.coherence_decay(3, 1);
        const double width = (g31 + 0.25 * p.omega_c_rabi * p.omega_c_rabi / g21) / std::abs(k2);
        const double two_photon = p.delta_p + p.delta_c;
        features.emplace_back(two_photon / k2, width);
        if (p.omega_s_rabi > 0.0) {
            const double split = 0.5 * std::hypot(p.delta_s, p.omega_s_rabi);
            features.emplace_back((two_photon + 0.5 * p.delta_s + split) / k2, width);
            features.emplace_back((two_photon + 0.5 * p.delta_s - split) / k2, width);
        }
    }
    std::vector<double> points;
    for (const auto& [v, w] : features) {
        if (!std::isfinite(v) || !std::isfinite(w)) continue;
        const double zc = v / sigma_v;
        const double zw = std::max(w / sigma_v, 1e-12);
        points.push_back(zc);
        for (double m : {1.0, 4.0, 16.0, 64.0}) {
            points.push_back(zc - m * zw);
            points.push_back(zc + m * zw);
        }
    }
    std::vector<double> inside;
    for (double z : points)
        if (z > -z_max && z < z_max) inside.push_back(z);
    return inside;
}

Vec4 scaled_alpha(const FourLevelParams& p, double v, ResponseMode mode, double alpha_ref,
                  const SteadyStateOptions& ss) {
    const Polarizability a = polarizability(p, v, mode, ss);
    const double r = a.alpha_r / alpha_ref;
    const double i = a.alpha_i / alpha_ref;
    return {r, i, r * r, i * i};
}

AlphaMoments finish_moments(const Vec4& sums, double alpha_ref, double tol, int order) {
    AlphaMoments m;
    m.mean_alpha = {sums[0] * alpha_ref, sums[1] * alpha_ref};
    m.quadrature_order = order;
    auto variance = [&](double second, double first, bool& clamped) {
        double var = second - first * first;
        if (var < 0.0) {
            if (var < -tol * std::max(second, 1e-300) * 10.0)
                throw ConvergenceError("alpha_moments: negative variance beyond tolerance", second, first * first);
            var = 0.0;
            clamped = true;
        }
        return var * alpha_ref * alpha_ref;
    };
    m.var_alpha_r = variance(sums[2], sums[0], m.clamped_r);
    m.var_alpha_i = variance(sums[3], sums[1], m.clamped_i);
    return m;
}

double alpha_reference(const FourLevelParams& p) {
    return p.mu12 * p.mu12 / (constants::hbar * p.coherence_decay(2, 1));
}

bool moments_agree(const Vec4& a, const Vec4& b, double tol) {
    const double mean_scale = std::hypot(b[0], b[1]);
    if (std::abs(a[0] - b[0]) > tol * mean_scale) return false;
    if (std::abs(a[1] - b[1]) > tol * mean_scale) return false;
    for (int c = 2; c < 4; ++c)
        if (std::abs(a[c] - b[c]) > tol * std::abs(b[c])) return false;
    return true;
}

MomentsResult gauss_hermite_moments(const FourLevelParams& p, double sigma_v, ResponseMode mode,
                                    const QuadratureOptions& opt) {
    const double ref = alpha_reference(p);
    auto evaluate = [&](const VelocityRule& rule) {
        Vec4 s{};
        for (std::size_t k = 0; k < rule.size(); ++k) {
            const Vec4 v = scaled_alpha(p, rule.velocities[k], mode, ref, opt.steady_state);
            for (int c = 0; c < 4; ++c) s[c] += rule.weights[k] * v[c];
        }
        return s;
    };
    int order = std::max(opt.initial_order, 8);
    VelocityRule rule = gauss_hermite_rule(order, sigma_v);
    Vec4 previous = evaluate(rule);
    while (2 * order <= opt.max_order) {
        order *= 2;
        VelocityRule next = gauss_hermite_rule(order, sigma_v);
        const Vec4 current = evaluate(next);
        if (moments_agree(previous, current, opt.rel_tol)) {
            return {finish_moments(current, ref, opt.rel_tol, order), std::move(next)};
        }
        previous = current;
        rule = std::move(next);
    }
    throw ConvergenceError("alpha_moments: Gauss-Hermite did not converge by max order",
                           previous[3] - previous[1] * previous[1], 0.0);
}

MomentsResult adaptive_moments(const FourLevelParams& p, double sigma_v, ResponseMode mode,
                               const QuadratureOptions& opt) {
    const double ref = alpha_reference(p);
    auto f = [&](double z) { return scaled_alpha(p, sigma_v * z, mode, ref, opt.steady_state); };

    std::vector<double> cuts;
    constexpr int kUniformPanels = 16;
    for (int k = 0; k <= kUniformPanels; ++k)
        cuts.push_back(-opt.z_max + 2.0 * opt.z_max * k / kUniformPanels);
    for (double z : resonance_breakpoints(p, sigma_v, opt.z_max)) cuts.push_back(z);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double x, double y) { return std::abs(x - y) <= 1e-14 * (1.0 + std::abs(x)); }),
               cuts.end());

    std::vector<Interval> intervals;
    intervals.reserve(4 * cuts.size());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) intervals.push_back(integrate_interval(cuts[k], cuts[k + 1], f));

    auto totals = [&](Vec4& kron, Vec4& gauss, Vec4& err) {
        kron = {};
        gauss = {};
        err = {};
        for (const auto& iv : intervals)
            for (int c = 0; c < 4; ++c) {
                kron[c] += iv.kronrod[c];
                gauss[c] += iv.gauss[c];
                err[c] += iv.error[c];
            }
    };

    Vec4 kron, gauss, err;
    while (true) {
        totals(kron, gauss, err);
        const double mean_scale = std::hypot(kron[0], kron[1]);
        const std::array<double, 4> scale = {mean_scale, mean_scale, std::abs(kron[2]), std::abs(kron[3])};
        bool converged = true;
        for (int c = 0; c < 4; ++c)
            if (err[c] > opt.rel_tol * scale[c]) converged = false;
        if (converged) break;
        if (intervals.size() >= opt.max_intervals)
            throw ConvergenceError("alpha_moments: adaptive quadrature exceeded max_intervals",
                                   gauss[3] - gauss[1] * gauss[1], kron[3] - kron[1] * kron[1]);

        std::size_t worst = 0;
        double worst_badness = -1.0;
        for (std::size_t k = 0; k < intervals.size(); ++k) {
            double badness = 0.0;
            for (int c = 0; c < 4; ++c)
                if (scale[c] > 0.0) badness = std::max(badness, intervals[k].error[c] / scale[c]);
            if (badness > worst_badness) {
                worst_badness = badness;
                worst = k;
            }
        }
        const Interval split = intervals[worst];
        const double mid = 0.5 * (split.a + split.b);
        intervals[worst] = integrate_interval(split.a, mid, f);
        intervals.push_back(integrate_interval(mid, split.b, f));
    }

    std::sort(intervals.begin(), intervals.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
    VelocityRule rule;
    rule.velocities.reserve(15 * intervals.size());
    rule.weights.reserve(15 * intervals.size());
    for (const auto& iv : intervals) append_interval_rule(iv.a, iv.b, sigma_v, rule);

    return {finish_moments(kron, ref, opt.rel_tol, static_cast<int>(rule.size())), std::move(rule)};
}

}  // namespace

void GasParams::validate() const {
    if (!(density_n > 0.0) || !std::isfinite(density_n)) throw DomainError("gas density must be > 0");
    if (!(temperature_T > 0.0) || !std::isfinite(temperature_T)) throw DomainError("gas temperature must be > 0");
    if (!(mass_m > 0.0) || !std::isfinite(mass_m)) throw DomainError("atomic mass must be > 0");
}

VelocityDistribution velocity_distribution(const GasParams& gas) {
    gas.validate();
    const double kt_over_m = constants::boltzmann * gas.temperature_T / gas.mass_m;
    return {std::sqrt(kt_over_m), std::sqrt(8.0 * kt_over_m / constants::pi)};
}

std::string_view to_string(QuadratureMethod m) {
    return m == QuadratureMethod::adaptive ? "adaptive" : "gauss-hermite";
}

QuadratureMethod quadrature_method_from_string(std::string_view s) {
    if (s == "adaptive") return QuadratureMethod::adaptive;
    if (s == "gauss-hermite") return QuadratureMethod::gauss_hermite;
    throw ConfigError("unknown quadrature method '" + std::string(s) + "' (expected adaptive|gauss-hermite)");
}

VelocityRule gauss_hermite_rule(int order, double sigma_v) {
    if (order < 1) throw DomainError("gauss_hermite_rule: order must be >= 1");
    static std::mutex cache_mutex;
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;

    std::pair<std::vector<double>, std::vector<double>> nodes;
    {
        std::lock_guard lock(cache_mutex);
        auto it = cache.find(order);
        if (it == cache.end()) {
            // Golub-Welsch for the physicists' weight exp(-x^2).
            Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
            Eigen::VectorXd sub(std::max(order - 1, 0));
            for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(0.5 * k);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
            solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
            std::vector<double> x(order), w(order);
            for (int k = 0; k < order; ++k) {
                x[k] = solver.eigenvalues()[k];
                const double v0 = solver.eigenvectors()(0, k);
                w[k] = v0 * v0;  // sqrt(pi) * v0^2 / sqrt(pi)
            }
            it = cache.emplace(order, std::make_pair(std::move(x), std::move(w))).first;
        }
        nodes = it->second;
    }
    VelocityRule rule;
    rule.velocities.resize(order);
    rule.weights = std::move(nodes.second);
    for (int k = 0; k < order; ++k) rule.velocities[k] = std::sqrt(2.0) * sigma_v * nodes.first[k];
    return rule;
}

AlphaMoments moments_on_rule(const FourLevelParams& params, const VelocityRule& rule, ResponseMode mode,
                             const SteadyStateOptions& options) {
    const double ref = alpha_reference(params);
    Vec4 s{};
    for (std::size_t k = 0; k < rule.size(); ++k) {
        const Vec4 v = scaled_alpha(params, rule.velocities[k], mode, ref, options);
        for (int c = 0; c < 4; ++c) s[c] += rule.weights[k] * v[c];
    }
    return finish_moments(s, ref, 1e-6, static_cast<int>(rule.size()));
}

MomentsResult alpha_moments_with_rule(const FourLevelParams& params, const GasParams& gas, ResponseMode mode,
                                      const QuadratureOptions& options) {
    params.validate();
    if (options.initial_order < 8) throw DomainError("alpha_moments: quadrature order must be >= 8");
    const VelocityDistribution dist = velocity_distribution(gas);
    if (options.method == QuadratureMethod::gauss_hermite) return gauss_hermite_moments(params, dist.sigma_v, mode, options);
    return adaptive_moments(params, dist.sigma_v, mode, options);
}

AlphaMoments alpha_moments(const FourLevelParams& params, const GasParams& gas, ResponseMode mode,
                           const QuadratureOptions& options) {
    return alpha_moments_with_rule(params, gas, mode, options).moments;
}

double intrinsic_variance(const GasParams& gas, double var_alpha_q) {
    if (var_alpha_q < 0.0) throw DomainError("intrinsic_variance: variance must be >= 0");
    const double s = gas.density_n / constants::epsilon0;
    return s * s * var_alpha_q;
}

double fluctuation_parameter(double a_prefactor, double intrinsic_variance_i) {
    if (a_prefactor < 0.0 || intrinsic_variance_i < 0.0) throw DomainError("fluctuation_parameter: inputs must be >= 0");
    return a_prefactor * a_prefactor * intrinsic_variance_i;
}

double fluctuation_parameter(double transduction_G, double intrinsic_variance_q, double nu) {
    if (nu == 0.0) throw DomainError("fluctuation_parameter: photon transduction nu must be nonzero");
    if (intrinsic_variance_q < 0.0) throw DomainError("fluctuation_parameter: intrinsic variance must be >= 0");
    return transduction_G * transduction_G * intrinsic_variance_q / (nu * nu);
}

}  // namespace granoise
