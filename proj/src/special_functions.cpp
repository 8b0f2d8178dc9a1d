#include "bcgc/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bcgc {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Power series Ei(x) = gamma + ln|x| + sum_k x^k / (k * k!), x < 0.
double ei_series(double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k <= 200; ++k) {
        term *= x / k;
        sum += term / k;
        if (std::fabs(term / k) < eps * (std::fabs(sum) + 1.0)) break;
    }
    return kEulerGamma + std::log(-x) + sum;
}

// e^z E1(z) = 1 / (z+1 - 1^2/(z+3 - 2^2/(z+5 - ...))), z > 0,
// evaluated with the modified Lentz method.
double e1_scaled_continued_fraction(double z) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double fpmin = std::numeric_limits<double>::min() / eps;
    double b = z + 1.0;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 400; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double del = c * d;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

} // namespace

double exponential_integral(double x) {
    if (!(x < 0.0))
        throw std::domain_error("exponential_integral: argument must be negative");
    // Series for moderate |x|, continued fraction beyond. The crossover keeps
    // the series' alternating cancellation within ~5 digits.
    if (x > -6.0) return ei_series(x);
    return -e1_scaled_continued_fraction(-x) * std::exp(x);
}

double exp_scaled_exponential_integral(double z) {
    if (!(z > 0.0))
        throw std::domain_error(
            "exp_scaled_exponential_integral: argument must be positive");
    if (z < 6.0) return std::exp(z) * ei_series(-z);
    return -e1_scaled_continued_fraction(z);
}

double harmonic_number(int n) {
    if (n < 0) throw std::domain_error("harmonic_number: n must be >= 0");
    double h = 0.0;
    for (int i = 1; i <= n; ++i) h += 1.0 / i;
    return h;
}

double log_binomial(int n, int k) {
    if (k < 0 || k > n) throw std::domain_error("log_binomial: k out of range");
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

} // namespace bcgc
