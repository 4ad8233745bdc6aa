#include "granoise/units.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <utility>

#include "granoise/constants.hpp"
#include "granoise/errors.hpp"

namespace granoise::units {

namespace {

using Table = std::map<std::string, double, std::less<>>;

const Table& table_for(Kind kind) {
    static const std::map<Kind, Table> tables = {
        {Kind::dimensionless, {{"", 1.0}}},
        {Kind::density, {{"m^-3", 1.0}, {"cm^-3", 1e6}}},
        {Kind::temperature, {{"K", 1.0}}},
        {Kind::mass, {{"kg", 1.0}, {"u", constants::atomic_mass_unit}}},
        {Kind::length, {{"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}}},
        {Kind::power, {{"W", 1.0}, {"mW", 1e-3}, {"uW", 1e-6}, {"nW", 1e-9}}},
        {Kind::angular_rate,
         {{"rad/s", 1.0},
          {"krad/s", 1e3},
          {"Mrad/s", 1e6},
          {"Hz", constants::two_pi},
          {"kHz", constants::two_pi * 1e3},
          {"MHz", constants::two_pi * 1e6},
          {"GHz", constants::two_pi * 1e9}}},
        {Kind::dipole, {{"C m", 1.0}, {"e a0", constants::elementary_charge * constants::bohr_radius}}},
        {Kind::time, {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}}},
    };
    return tables.at(kind);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string_view to_string(Kind kind) {
    switch (kind) {
        case Kind::dimensionless: return "dimensionless";
        case Kind::density: return "density";
        case Kind::temperature: return "temperature";
        case Kind::mass: return "mass";
        case Kind::length: return "length";
        case Kind::power: return "power";
        case Kind::angular_rate: return "rate";
        case Kind::dipole: return "dipole moment";
        case Kind::time: return "time";
    }
    return "?";
}

double parse_quantity(std::string_view text, Kind kind, const std::string& key) {
    const std::string_view s = trim(text);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || !std::isfinite(value))
        throw ConfigError("key '" + key + "': cannot parse a number from '" + std::string(text) + "'");
    const std::string_view unit = trim(std::string_view(end, static_cast<std::size_t>(s.data() + s.size() - end)));
    const Table& table = table_for(kind);
    const auto it = table.find(unit);
    if (it == table.end()) {
        std::string allowed;
        for (const auto& [name, factor] : table) allowed += (allowed.empty() ? "" : ", ") + (name.empty() ? "<none>" : name);
        throw ConfigError("key '" + key + "': unit '" + std::string(unit) + "' is not a " +
                          std::string(to_string(kind)) + " unit (allowed: " + allowed + ")");
    }
    return value * it->second;
}

}  // namespace granoise::units
