#pragma once

// Quad-precision survival kernel for finite-difference oracles. Extended
// precision only sharpens the oracle's own roundoff; the production code under
// test stays in double.

#include <quadmath.h>

namespace testq {

inline __float128 norm_cdf_q(__float128 x) {
    return erfcq(-x / 1.41421356237309504880168872420969808Q) / 2.0Q;
}

inline __float128 psi_closed_q(__float128 eta, __float128 t, __float128 y) {
    const __float128 st = sqrtq(t);
    return norm_cdf_q((-y + eta * t) / st) - expq(2.0Q * eta * y) * norm_cdf_q((y + eta * t) / st);
}

// Central finite difference of psi in t, evaluated in quad precision.
inline double psi_fd_q(double eta, double t, double y, double h) {
    const __float128 e = eta, tt = t, yy = y, hh = h;
    return static_cast<double>((psi_closed_q(e, tt + hh, yy) - psi_closed_q(e, tt - hh, yy)) /
                               (2.0Q * hh));
}

} // namespace testq
