// units.hpp — frequency/time unit conventions shared across the library.
//
// Internal convention: angular frequencies in rad/ns, times in ns (hbar = 1,
// so energies are angular frequencies too).  Configuration files and CSV
// output quote ordinary frequencies (GHz / MHz), converted at the boundary.

#pragma once

#include <cmath>

namespace mist {

inline constexpr double two_pi = 6.283185307179586476925286766559;

// ordinary frequency -> angular rad/ns
inline constexpr double ghz_to_rad(double f_ghz) { return two_pi * f_ghz; }
inline constexpr double mhz_to_rad(double f_mhz) { return two_pi * 1e-3 * f_mhz; }

// angular rad/ns -> ordinary frequency
inline constexpr double rad_to_ghz(double w) { return w / two_pi; }
inline constexpr double rad_to_mhz(double w) { return 1e3 * w / two_pi; }

// plain rates (not angular): 1/ns <-> 1/us
inline constexpr double per_ns_to_per_us(double r) { return 1e3 * r; }

inline constexpr double us_to_ns(double t_us) { return 1e3 * t_us; }

} // namespace mist
