#pragma once

#include <string>
#include <string_view>

namespace granoise::units {

enum class Kind {
    dimensionless,
    density,          // m^-3, cm^-3
    temperature,      // K
    mass,             // kg, u
    length,           // m, cm, mm, um, nm
    power,            // W, mW, uW, nW
    angular_rate,     // rad/s, krad/s, Mrad/s; Hz, kHz, MHz, GHz are cyclic (x 2 pi)
    dipole,           // C m, e a0
    time,             // s, ms, us, ns
};

std::string_view to_string(Kind kind);

/// Parses "<number> <unit>" into SI. Rate units in Hz are cyclic frequencies,
/// so "7.9 MHz" yields 2 pi x 7.9e6 rad/s. Throws ConfigError naming `key`.
double parse_quantity(std::string_view text, Kind kind, const std::string& key);

}  // namespace granoise::units
