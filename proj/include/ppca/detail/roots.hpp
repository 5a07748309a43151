#ifndef PPCA_DETAIL_ROOTS_HPP
#define PPCA_DETAIL_ROOTS_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace ppca::detail {

/// Bisection on [lo, hi] for a sign change of f. Runs until the bracket
/// cannot shrink further in double precision.
template <typename F>
double bisect(F&& f, double lo, double hi, const char* what = "bisect") {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0))
        throw std::runtime_error(std::string(what) + ": no sign change on [" + std::to_string(lo) +
                                 ", " + std::to_string(hi) + "]");
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace ppca::detail

#endif  // PPCA_DETAIL_ROOTS_HPP
