#include "granoise/geometry_flux.hpp"

#include <cmath>
#include <string>

#include "granoise/constants.hpp"
#include "granoise/errors.hpp"

namespace granoise {

namespace {

// Density zero is meaningful for flux bookkeeping (empty cell); temperature and mass are not.
void validate_gas_for_flux(const GasParams& gas) {
    if (!(gas.density_n >= 0.0) || !std::isfinite(gas.density_n)) throw DomainError("gas density must be >= 0");
    if (!(gas.temperature_T > 0.0)) throw DomainError("gas temperature must be > 0");
    if (!(gas.mass_m > 0.0)) throw DomainError("atomic mass must be > 0");
}

}  // namespace

std::string_view to_string(IntensityConvention c) { return c == IntensityConvention::peak ? "peak" : "mean"; }

IntensityConvention intensity_convention_from_string(std::string_view s) {
    if (s == "peak") return IntensityConvention::peak;
    if (s == "mean") return IntensityConvention::mean;
    throw ConfigError("unknown intensity convention '" + std::string(s) + "' (expected peak|mean)");
}

std::string_view to_string(ResourceMode m) { return m == ResourceMode::flux ? "flux" : "snapshot"; }

void BeamGeometry::validate() const {
    if (!(waist_w0 > 0.0) || !std::isfinite(waist_w0)) throw DomainError("beam waist must be > 0");
    if (!(cell_length_L > 0.0) || !std::isfinite(cell_length_L)) throw DomainError("cell length must be > 0");
    if (!(lambda_p > 0.0) || !std::isfinite(lambda_p)) throw DomainError("probe wavelength must be > 0");
    if (!(power_in >= 0.0) || !std::isfinite(power_in)) throw DomainError("input power must be >= 0");
    if (!(saturation_power > 0.0)) throw DomainError("saturation power must be > 0");
}

double beam_volume(const BeamGeometry& geom) {
    geom.validate();
    return constants::pi * geom.waist_w0 * geom.waist_w0 * geom.cell_length_L;
}

double sidewall_area(const BeamGeometry& geom) {
    geom.validate();
    return 2.0 * constants::pi * geom.waist_w0 * geom.cell_length_L;
}

double mean_atom_number(const GasParams& gas, const BeamGeometry& geom) {
    validate_gas_for_flux(gas);
    return gas.density_n * beam_volume(geom);
}

double atom_flux(const GasParams& gas, const BeamGeometry& geom) {
    validate_gas_for_flux(gas);
    const double v_bar = std::sqrt(8.0 * constants::boltzmann * gas.temperature_T / (constants::pi * gas.mass_m));
    return gas.density_n * v_bar * sidewall_area(geom) / 4.0;
}

double photon_energy(const BeamGeometry& geom) {
    geom.validate();
    return constants::planck * constants::speed_of_light / geom.lambda_p;
}

double photon_flux(const BeamGeometry& geom) { return geom.power_in / photon_energy(geom); }

double resource_ratio(const GasParams& gas, const BeamGeometry& geom, ResourceMode mode, double dt) {
    const double phi_ph = photon_flux(geom);
    if (mode == ResourceMode::flux) {
        if (phi_ph == 0.0) return 0.0;
        const double phi_at = atom_flux(gas, geom);
        if (phi_at == 0.0) throw DomainError("resource_ratio: zero atom flux");
        return phi_ph / phi_at;
    }
    if (!(dt > 0.0)) throw DomainError("resource_ratio: snapshot mode needs dt > 0");
    if (phi_ph == 0.0) return 0.0;
    const double n_at = mean_atom_number(gas, geom);
    if (n_at == 0.0) throw DomainError("resource_ratio: zero mean atom number");
    return phi_ph * dt / n_at;
}

double optical_depth_prefactor(const BeamGeometry& geom) {
    geom.validate();
    return 2.0 * constants::pi * geom.cell_length_L / geom.lambda_p;
}

double probe_rabi_from_power(const BeamGeometry& geom, double mu12) {
    geom.validate();
    const double area = constants::pi * geom.waist_w0 * geom.waist_w0;
    const double intensity =
        (geom.intensity == IntensityConvention::peak ? 2.0 : 1.0) * geom.power_in / area;
    const double field = std::sqrt(2.0 * intensity / (constants::epsilon0 * constants::speed_of_light));
    return mu12 * field / constants::hbar;
}

double saturation_fraction(const BeamGeometry& geom) {
    geom.validate();
    return geom.power_in / geom.saturation_power;
}

double power_for_resource_ratio(const GasParams& gas, const BeamGeometry& geom, double R) {
    if (!(R >= 0.0)) throw DomainError("power_for_resource_ratio: R must be >= 0");
    return R * atom_flux(gas, geom) * photon_energy(geom);
}

ResourceAccounting resource_accounting(const GasParams& gas, const BeamGeometry& geom, ResourceMode mode,
                                       double dt) {
    ResourceAccounting acc;
    acc.mode = mode;
    acc.v_bm = beam_volume(geom);
    acc.n_at_mean = mean_atom_number(gas, geom);
    acc.phi_at = atom_flux(gas, geom);
    acc.phi_ph = photon_flux(geom);
    acc.resource_ratio_R = resource_ratio(gas, geom, mode, dt);
    acc.a_prefactor = optical_depth_prefactor(geom);
    return acc;
}

}  // namespace granoise
