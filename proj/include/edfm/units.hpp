#pragma once

/// Conversions from scenario-file units to SI. Everything inside the solvers
/// is SI: m, Pa, Pa s, m^2, s.
namespace edfm::units {

inline constexpr double millidarcy = 9.869233e-16;  // m^2
inline constexpr double centipoise = 1e-3;          // Pa s
inline constexpr double megapascal = 1e6;           // Pa
inline constexpr double day = 86400.0;              // s
inline constexpr double per_megapascal = 1e-6;      // 1/Pa

}  // namespace edfm::units
