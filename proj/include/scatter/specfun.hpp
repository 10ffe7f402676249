#ifndef SCATTER_SPECFUN_HPP
#define SCATTER_SPECFUN_HPP

#include "scatter/common.hpp"

namespace scatter::specfun {

// Cylinder functions of orders 0 and 1, evaluated by the ascending series
// for |t| < 12 and the Hankel asymptotic (P/Q) expansion beyond. Arguments
// past 1e4 are rejected; nothing at desk scale gets near that.
double bessel_j0(double t);
double bessel_j1(double t);
double bessel_y0(double t);  // t > 0
double bessel_y1(double t);  // t > 0

Complex hankel1_0(double t);  // J0 + i Y0, t > 0
Complex hankel1_1(double t);  // J1 + i Y1, t > 0

// 2*pi*J0(k|x|): the circle average of the plane wave e^{ik x.d} over all
// unit directions d.
double funk_hecke(double k, const Vec2& x);

// First positive maximizer of J1 and the value there. Derived once by
// bisection on J1' and cached; the literature quotes ~1.84 and ~0.581.
struct J1Peak {
    double argument;
    double value;
};
const J1Peak& j1_first_maximum();

}  // namespace scatter::specfun

#endif
