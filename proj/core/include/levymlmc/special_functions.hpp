#pragma once

namespace levymlmc {

double normal_cdf(double x) noexcept;
double normal_sf(double x) noexcept;

// Inverse of normal_cdf on (0, 1). Acklam's rational approximation refined by
// one Halley step, which brings it to full double precision.
double normal_quantile(double p);

// P(K > x) for the Kolmogorov distribution, via the alternating series.
double kolmogorov_sf(double x) noexcept;

}  // namespace levymlmc
