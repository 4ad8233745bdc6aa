#pragma once

#include <optional>

#include "granoise/io/scenario.hpp"
#include "granoise/io/table.hpp"
#include "granoise/monte_carlo.hpp"

namespace granoise::io {

/// Loaded parameters in SI plus the derived resource accounting.
/// Columns: quantity, value, unit.
Table run_fluxes(const Scenario& scenario);

/// Relative noise vs R, one block of rows per microwave Rabi frequency.
/// Columns: omega_s, R, sigma_ratio, sigma_agn, sigma_psn, J_at_point,
/// P_in_equivalent, weak_probe_flag. The flag is 1 where P_in_equivalent does
/// not exceed the saturation power.
Table run_scaling_sweep(const Scenario& scenario, unsigned threads = 1);

struct SensitivityMapOutput {
    /// Columns: P_in, w0, E_s, log10_E_s, E_s_shot_limit, R, J, identity_residual.
    Table grid;
    /// Same columns as the grid at the inset waist, swept over the power axis.
    Table inset;
};

SensitivityMapOutput run_sensitivity_map(const Scenario& scenario, unsigned threads = 1);

struct QuantumSweepOutput {
    /// Columns: Q, R, sigma_ratio, sigma_ratio_quantum, J_at_point, R_crit.
    /// sigma_ratio is relative to the shot-noise limit and sigma_ratio_quantum
    /// to the Q-dependent limit (missing for Q = -1).
    Table table;
    /// Root of R J(R) = 1; absent when the bracket holds no sign change.
    std::optional<double> R_crit;
};

QuantumSweepOutput run_quantum_sweep(const Scenario& scenario, unsigned threads = 1);

struct McValidationOutput {
    /// Per-point empirical vs analytic table.
    Table table;
    ScalingReport report;
    /// Density actually simulated (after any rescaling to the target J).
    double density_n = 0.0;
};

/// Monte Carlo check of the scaling law. analytic_J_scale multiplies the J
/// used for the analytic comparison; values other than 1 exist for self-tests.
McValidationOutput run_mc_validation(const Scenario& scenario, unsigned threads = 1, double analytic_J_scale = 1.0);

}  // namespace granoise::io
