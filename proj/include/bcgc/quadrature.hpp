#ifndef BCGC_QUADRATURE_HPP
#define BCGC_QUADRATURE_HPP

#include <functional>

namespace bcgc {

// Adaptive Gauss-Kronrod (G7,K15) integration on a finite interval.
// Subdivides until |K15 - G7| <= abs_tol + rel_tol * |integral|.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12, double abs_tol = 1e-300,
                 int max_depth = 48);

} // namespace bcgc

#endif
