#pragma once

// Acceptance thresholds used by the harness reports and the acceptance
// suite. Bump kVersion whenever a value changes.
namespace levymlmc::tolerances {

inline constexpr int kVersion = 1;

inline constexpr double normality_level = 0.01;
inline constexpr double normality_calibration_max_rate = 0.02;

inline constexpr double slope_lo = 0.85;
inline constexpr double slope_hi = 1.15;
inline constexpr double r2_min = 0.98;

inline constexpr double clt_variance_rel = 0.15;
inline constexpr double clt_delta_consistency_rel = 0.15;

inline constexpr double tune_ratio = 1.01;

inline constexpr double upsilon_mc_stderrs = 4.0;
inline constexpr double oracle_combined_stderrs = 3.0;
inline constexpr double bias_stderrs = 3.0;
inline constexpr int bias_min_hits = 95;
inline constexpr double complexity_ratio = 2.0;

}  // namespace levymlmc::tolerances
