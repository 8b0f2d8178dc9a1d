#ifndef BCGC_SPECIAL_FUNCTIONS_HPP
#define BCGC_SPECIAL_FUNCTIONS_HPP

namespace bcgc {

// Exponential integral Ei(x) for x < 0. Accurate to better than 1e-10
// relative; throws std::domain_error for x >= 0 (only negative arguments
// occur in the order-statistic formulas).
double exponential_integral(double x);

// e^z * Ei(-z) for z > 0, evaluated without forming e^z (which overflows
// past z ~ 709 while the product stays O(1/z)).
double exp_scaled_exponential_integral(double z);

// H_n = sum_{i=1}^n 1/i, with H_0 = 0.
double harmonic_number(int n);

// Natural log of binomial(n, k).
double log_binomial(int n, int k);

} // namespace bcgc

#endif
