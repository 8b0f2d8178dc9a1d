#include "bcgc/quadrature.hpp"

#include <cmath>

namespace bcgc {

namespace {

// 15-point Kronrod nodes on [-1,1] (positive half) and weights, with the
// embedded 7-point Gauss rule on the odd-indexed nodes.
constexpr double kNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
    double integral;
    double error;
};

Panel gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double kronrod = kKronrodW[7] * f(c);
    double gauss = kGaussW[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const double x = h * kNodes[i];
        const double fsum = f(c - x) + f(c + x);
        kronrod += kKronrodW[i] * fsum;
        if (i % 2 == 1) gauss += kGaussW[i / 2] * fsum;
    }
    kronrod *= h;
    gauss *= h;
    return {kronrod, std::fabs(kronrod - gauss)};
}

double adapt(const std::function<double(double)>& f, double a, double b,
             const Panel& p, double rel_tol, double abs_tol, int depth) {
    if (depth <= 0 || p.error <= abs_tol + rel_tol * std::fabs(p.integral))
        return p.integral;
    const double c = 0.5 * (a + b);
    const Panel left = gauss_kronrod(f, a, c);
    const Panel right = gauss_kronrod(f, c, b);
    return adapt(f, a, c, left, rel_tol, 0.5 * abs_tol, depth - 1) +
           adapt(f, c, b, right, rel_tol, 0.5 * abs_tol, depth - 1);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol, int max_depth) {
    const Panel p = gauss_kronrod(f, a, b);
    return adapt(f, a, b, p, rel_tol, abs_tol, max_depth);
}

} // namespace bcgc
