#include "granoise/io/runs.hpp"

#include <cmath>

#include "granoise/constants.hpp"
#include "granoise/errors.hpp"
#include "granoise/parallel.hpp"

namespace granoise::io {

namespace {

const SweepSpec& require_sweep(const Scenario& sc) {
    if (!sc.sweep) throw ConfigError("scenario '" + sc.name + "' has no sweep block");
    return *sc.sweep;
}

// J(R) evaluated on the R axis, row-major over (curve, point).
std::vector<double> j_grid(const std::vector<JOfR>& curves, const std::vector<double>& R, unsigned threads) {
    std::vector<double> out(curves.size() * R.size());
    parallel_for(out.size(), threads, [&](std::size_t idx) { out[idx] = curves[idx / R.size()](R[idx % R.size()]); });
    return out;
}

void add_sensitivity_row(Table& t, double power, double waist, const std::optional<SensitivityResult>& s) {
    if (!s) {
        t.add_row({power, waist, {}, {}, {}, {}, {}, {}});
        return;
    }
    t.add_row({power, waist, s->E_s, s->log10_E_s(), s->E_s_shot, s->R, s->J, s->identity_residual});
}

const std::vector<std::string> sensitivity_columns = {"P_in", "w0", "E_s", "log10_E_s",
                                                      "E_s_shot_limit", "R", "J", "identity_residual"};

}  // namespace

Table run_fluxes(const Scenario& sc) {
    const OperatingPoint& op = sc.base;
    const ResourceAccounting acc = resource_accounting(op.gas, op.geometry, ResourceMode::flux, op.dt);
    const VelocityDistribution vd = velocity_distribution(op.gas);
    const FourLevelParams lv = op.levels_at_power();
    Table t({"quantity", "value", "unit"});
    auto row = [&](const char* name, double value, const char* unit) {
        t.add_row({std::string(name), value, std::string(unit)});
    };
    row("density_n", op.gas.density_n, "m^-3");
    row("temperature_T", op.gas.temperature_T, "K");
    row("mass_m", op.gas.mass_m, "kg");
    row("waist_w0", op.geometry.waist_w0, "m");
    row("cell_length_L", op.geometry.cell_length_L, "m");
    row("lambda_p", op.geometry.lambda_p, "m");
    row("power_in", op.geometry.power_in, "W");
    row("saturation_power", op.geometry.saturation_power, "W");
    row("omega_c_over_2pi", lv.omega_c_rabi / constants::two_pi, "Hz");
    row("omega_s_over_2pi", lv.omega_s_rabi / constants::two_pi, "Hz");
    row("omega_p_over_2pi", lv.omega_p_rabi / constants::two_pi, "Hz");
    row("sigma_v", vd.sigma_v, "m/s");
    row("v_bar", vd.v_bar, "m/s");
    row("beam_volume", acc.v_bm, "m^3");
    row("mean_atom_number", acc.n_at_mean, "1");
    row("atom_flux", acc.phi_at, "s^-1");
    row("photon_flux", acc.phi_ph, "s^-1");
    row("resource_ratio_R", acc.resource_ratio_R, "1");
    row("optical_depth_prefactor_a", acc.a_prefactor, "1");
    row("saturation_fraction", saturation_fraction(op.geometry), "1");
    return t;
}

Table run_scaling_sweep(const Scenario& sc, unsigned threads) {
    const SweepSpec& sweep = require_sweep(sc);
    const std::vector<double> R = sweep.single_axis("R").values();
    std::vector<double> omegas = sweep.omega_s_list;
    if (omegas.empty()) omegas.push_back(sc.base.levels.omega_s_rabi);

    std::vector<JOfR> curves;
    for (double w : omegas) {
        OperatingPoint op = sc.base;
        op.levels.omega_s_rabi = w;
        curves.emplace_back(op);
    }
    const std::vector<double> J = j_grid(curves, R, threads);

    const OperatingPoint& op = sc.base;
    const double nu = std::abs(op.readout.photon_transduction_nu);
    const double n_at = atom_flux(op.gas, op.geometry) * op.dt;
    Table t({"omega_s", "R", "sigma_ratio", "sigma_agn", "sigma_psn", "J_at_point", "P_in_equivalent",
             "weak_probe_flag"});
    for (std::size_t c = 0; c < omegas.size(); ++c) {
        for (std::size_t k = 0; k < R.size(); ++k) {
            const double j = J[c * R.size() + k];
            const double power = curves[c].power_for(R[k]);
            const double sigma_psn = R[k] > 0.0 ? nu / std::sqrt(R[k] * n_at) : std::numeric_limits<double>::infinity();
            t.add_row({omegas[c], R[k], scaling_ratio(R[k], j), nu * std::sqrt(j / n_at), sigma_psn, j, power,
                       std::int64_t{power <= op.geometry.saturation_power ? 1 : 0}});
        }
    }
    return t;
}

SensitivityMapOutput run_sensitivity_map(const Scenario& sc, unsigned threads) {
    const SweepSpec& sweep = require_sweep(sc);
    const std::vector<double> powers = sweep.map_axis("power_in").values();
    const std::vector<double> waists = sweep.map_axis("waist").values();

    SensitivityMapOutput out{Table(sensitivity_columns), Table(sensitivity_columns)};
    const SensitivityMap map = sensitivity_map(powers, waists, sc.base, threads);
    for (std::size_t ip = 0; ip < powers.size(); ++ip)
        for (std::size_t iw = 0; iw < waists.size(); ++iw) add_sensitivity_row(out.grid, powers[ip], waists[iw], map.at(ip, iw));

    const SensitivityMap inset = sensitivity_map(powers, {sweep.inset_waist}, sc.base, threads);
    for (std::size_t ip = 0; ip < powers.size(); ++ip)
        add_sensitivity_row(out.inset, powers[ip], sweep.inset_waist, inset.at(ip, 0));
    return out;
}

QuantumSweepOutput run_quantum_sweep(const Scenario& sc, unsigned threads) {
    const SweepSpec& sweep = require_sweep(sc);
    const Axis& axis = sweep.single_axis("R");
    const std::vector<double> R = axis.values();
    std::vector<double> qs = sweep.q_list;
    if (qs.empty()) qs.push_back(sc.base.stats.mandel_Q);

    const std::vector<JOfR> curve{JOfR(sc.base)};
    const std::vector<double> J = j_grid(curve, R, threads);

    QuantumSweepOutput out{Table({"Q", "R", "sigma_ratio", "sigma_ratio_quantum", "J_at_point", "R_crit"}), {}};
    const auto [lo, hi] = sweep.r_crit_bracket.value_or(std::make_pair(axis.min, axis.max));
    if (hi > lo) {
        try {
            out.R_crit = quantum_advantage_boundary(curve[0], lo, hi);
        } catch (const BracketError&) {
            out.R_crit.reset();
        }
    }
    for (double q : qs) {
        PhotonStatistics stats;
        stats.mandel_Q = q;
        for (std::size_t k = 0; k < R.size(); ++k) {
            const GeneralizedRatio g = generalized_scaling_ratio(R[k], J[k], stats);
            out.table.add_row({q, R[k], g.relative_to_shot_limit, optional_cell(g.relative_to_quantum_limit), J[k],
                               optional_cell(out.R_crit)});
        }
    }
    return out;
}

McValidationOutput run_mc_validation(const Scenario& sc, unsigned threads, double analytic_J_scale) {
    if (!sc.mc) throw ConfigError("scenario '" + sc.name + "' has no mc block");
    const McSpec& mc = *sc.mc;

    OperatingPoint op = sc.base;
    op.mode = mc.mode;
    double J = evaluate_signal(op).J;
    if (mc.target_J) {
        if (!(J > 0.0)) throw ConfigError("mc.target_J: the scenario has J = 0, density rescaling impossible");
        // J is proportional to n^2 at fixed a.
        op.gas.density_n *= std::sqrt(*mc.target_J / J);
        J = evaluate_signal(op).J;
    }

    AtomicModel model;
    model.levels = mc.mode == ResponseMode::full ? op.levels_at_power() : op.levels;
    model.gas = op.gas;
    model.a_prefactor = op.readout.G_for(op.geometry);
    model.steady_state = op.quadrature.steady_state;

    TrialConfig base;
    base.seed = mc.seed;
    base.trials = mc.trials;
    base.n_at_mean = mc.n_at_mean;
    base.stats = mc.stats.value_or(op.stats);
    base.mode = mc.mode;
    base.reference = mc.reference;
    base.linearized_comparison = mc.linearized_comparison;

    std::vector<double> R = mc.r_grid.values();
    if (mc.r_grid.variable == "R_times_J") {
        if (!(J > 0.0)) throw ConfigError("mc.r_grid: R_times_J needs J > 0");
        for (double& r : R) r /= J;
    }

    ScalingValidationOptions options;
    options.tolerance = mc.tolerance;
    options.analytic_J_scale = analytic_J_scale;
    options.threads = threads;

    McValidationOutput out;
    out.density_n = op.gas.density_n;
    out.report = validate_scaling(R, base, model, J, options);
    out.table = Table({"R", "R_times_J", "n_at_mean", "n_ph_mean", "achieved_Q", "empirical_ratio", "ci_low",
                       "ci_high", "analytic_ratio", "deviation", "pass", "atom_resamples", "photon_resamples"});
    for (const ScalingRow& r : out.report.rows)
        out.table.add_row({r.R, r.R * J, r.n_at_mean, r.n_ph_mean, r.achieved_Q, r.empirical_ratio, r.ci_low,
                           r.ci_high, r.analytic_ratio, r.deviation, std::int64_t{r.pass ? 1 : 0},
                           std::int64_t{r.atom_resamples}, std::int64_t{r.photon_resamples}});
    return out;
}

}  // namespace granoise::io
