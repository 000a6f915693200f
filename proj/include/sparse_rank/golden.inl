#pragma once

#include <cmath>
#include <utility>

namespace sparse_rank {

template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo;
    double b = hi;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    double best_x = x1;
    double best_f = f1;
    if (f2 > best_f) {
        best_x = x2;
        best_f = f2;
    }
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
            if (f2 > best_f) {
                best_x = x2;
                best_f = f2;
            }
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
            if (f1 > best_f) {
                best_x = x1;
                best_f = f1;
            }
        }
    }
    return {best_x, best_f};
}

}  // namespace sparse_rank
