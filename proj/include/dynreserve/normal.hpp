#pragma once

namespace dynreserve {

// Standard normal CDF, Phi(y).
double std_normal_cdf(double y);

// Inverse standard normal CDF. Throws std::domain_error("infinite quantile")
// for p <= 0 or p >= 1.
double std_normal_inv(double p);

}  // namespace dynreserve
