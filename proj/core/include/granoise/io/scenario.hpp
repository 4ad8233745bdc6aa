#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "granoise/monte_carlo.hpp"
#include "granoise/noise_scaling.hpp"

namespace granoise::io {

enum class AxisScale { linear, log };

std::string_view to_string(AxisScale s);

/// One sweep axis. Variables: "R", "R_times_J", "power_in" (W), "waist" (m).
struct Axis {
    std::string variable;
    AxisScale scale = AxisScale::log;
    double min = 0.0;
    double max = 0.0;
    int points = 1;

    /// Grid values in order; endpoints are exact.
    std::vector<double> values() const;
    void validate() const;
};

struct SweepSpec {
    std::vector<Axis> axes;
    /// Microwave Rabi frequencies for one curve block each (rad/s); empty means the scenario value.
    std::vector<double> omega_s_list;
    std::vector<double> q_list;
    double inset_waist = 0.85e-3;
    /// Bracket for the boundary search; defaults to the R axis range.
    std::optional<std::pair<double, double>> r_crit_bracket;

    /// The single axis of a 1D sweep with the given variable; throws ConfigError otherwise.
    const Axis& single_axis(std::string_view variable) const;
    /// The axis with this variable in a two-axis map; throws ConfigError otherwise.
    const Axis& map_axis(std::string_view variable) const;
};

struct McSpec {
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    double n_at_mean = 0.0;
    Axis r_grid;
    /// When set, the density is rescaled so that J equals this value.
    std::optional<double> target_J;
    double tolerance = 0.05;
    ResponseMode mode = ResponseMode::weak_probe;
    PhotonReference reference = PhotonReference::incident;
    std::optional<PhotonStatistics> stats;
    bool linearized_comparison = true;
};

struct Scenario {
    std::string name;
    OperatingPoint base;
    std::optional<SweepSpec> sweep;
    std::optional<McSpec> mc;
    /// Merged scenario document, keys sorted, used for the config hash.
    std::string canonical_json;
};

/// Parses a scenario document. A top-level "base" key names another scenario
/// file (relative to base_dir) whose contents are merged underneath.
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});

/// Reads and parses a scenario file; every failure is a ConfigError naming the key.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace granoise::io
