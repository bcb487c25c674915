#pragma once

namespace omsense {

inline constexpr double pi = 3.14159265358979323846;

// CODATA 2018 exact defining values; used only to convert kelvin into
// occupation numbers.
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double k_boltzmann = 1.380649e-23;    // J / K

}  // namespace omsense
