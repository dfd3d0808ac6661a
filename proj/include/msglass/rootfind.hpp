#pragma once

#include <cmath>
#include <cstdlib>
#include <limits>
#include <utility>

#include "msglass/errors.hpp"

namespace msglass::detail {

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
};

/// Brent-Dekker iteration on a sign-changing bracket [a,b]. Runs until the
/// bracket collapses to a few ulps (or f hits 0 exactly), so the result is as
/// good as the function's own rounding noise allows; callers certify the
/// returned residual against their own tolerance.
template <class F>
RootResult brent_root(F&& f, double a, double b, double fa, double fb, int max_iter = 300) {
    if (fa == 0.0) return {a, fa, 0};
    if (fb == 0.0) return {b, fb, 0};
    if ((fa > 0.0) == (fb > 0.0)) {
        throw NumericalError("brent_root: bracket endpoints have the same sign");
    }
    double c = a, fc = fa;
    double d = b - a, e = d;
    int it = 0;
    for (; it < max_iter; ++it) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                           std::numeric_limits<double>::denorm_min();
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) break;
        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            // Inverse quadratic interpolation, falling back to secant.
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double r = fb / fc, t = fa / fc;
                p = s * (2.0 * m * t * (t - r) - (b - a) * (r - 1.0));
                q = (t - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
    }
    return {b, fb, it};
}

/// Plain bisection on a sign-changing bracket, run to a machine-tight
/// interval. Robust near double roots where interpolation stalls.
template <class F>
RootResult bisect_root(F&& f, double lo, double hi, double flo, double fhi, int max_iter = 200) {
    if (flo == 0.0) return {lo, flo, 0};
    if (fhi == 0.0) return {hi, fhi, 0};
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw NumericalError("bisect_root: bracket endpoints have the same sign");
    }
    double mid = lo, fmid = flo;
    int it = 0;
    for (; it < max_iter; ++it) {
        mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // interval no longer splittable
        fmid = f(mid);
        if (fmid == 0.0) return {mid, fmid, it + 1};
        if ((fmid > 0.0) == (fhi > 0.0)) {
            hi = mid;
            fhi = fmid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    return (std::abs(flo) < std::abs(fhi)) ? RootResult{lo, flo, it} : RootResult{hi, fhi, it};
}

} // namespace msglass::detail
