#pragma once

#include <string_view>

#include "granoise/ensemble_stats.hpp"

namespace granoise {

enum class IntensityConvention {
    peak,  // I = 2P / (pi w0^2), on-axis value of a Gaussian beam
    mean,  // I = P / (pi w0^2), top-hat over the waist
};

std::string_view to_string(IntensityConvention c);
IntensityConvention intensity_convention_from_string(std::string_view s);

/// Probe beam modeled as a cylinder of radius waist_w0 along the cell.
struct BeamGeometry {
    double waist_w0 = 0.0;          // m
    double cell_length_L = 0.0;     // m
    double lambda_p = 0.0;          // m
    double power_in = 0.0;          // W
    double saturation_power = 0.0;  // W
    IntensityConvention intensity = IntensityConvention::peak;

    /// Power may be zero; every length must be strictly positive.
    void validate() const;
};

enum class ResourceMode { flux, snapshot };

std::string_view to_string(ResourceMode m);

struct ResourceAccounting {
    double v_bm = 0.0;
    double n_at_mean = 0.0;
    double phi_at = 0.0;
    double phi_ph = 0.0;
    double resource_ratio_R = 0.0;
    double a_prefactor = 0.0;
    ResourceMode mode = ResourceMode::flux;
};

double beam_volume(const BeamGeometry& geom);
double sidewall_area(const BeamGeometry& geom);
double mean_atom_number(const GasParams& gas, const BeamGeometry& geom);
double atom_flux(const GasParams& gas, const BeamGeometry& geom);
double photon_energy(const BeamGeometry& geom);
double photon_flux(const BeamGeometry& geom);

/// Flux mode: phi_ph / phi_at. Snapshot mode: phi_ph dt / (n V_bm), dt > 0 required.
double resource_ratio(const GasParams& gas, const BeamGeometry& geom, ResourceMode mode, double dt = 0.0);

double optical_depth_prefactor(const BeamGeometry& geom);

/// Probe Rabi frequency from the incident power, Omega_p = (mu12/hbar) sqrt(2 I / (eps0 c)).
double probe_rabi_from_power(const BeamGeometry& geom, double mu12);

double saturation_fraction(const BeamGeometry& geom);

/// Incident power that yields resource ratio R in flux mode.
double power_for_resource_ratio(const GasParams& gas, const BeamGeometry& geom, double R);

ResourceAccounting resource_accounting(const GasParams& gas, const BeamGeometry& geom,
                                       ResourceMode mode = ResourceMode::flux, double dt = 1.0);

}  // namespace granoise
