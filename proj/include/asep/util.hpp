#pragma once

#include <complex>
#include <cstdio>
#include <string>

namespace asep {

using cplx = std::complex<double>;

// Kahan compensated accumulator. Series assembly and the big quadrature
// reductions run through this so summation order plus compensation gives
// run-to-run identical results.
template <typename T>
struct KahanSum {
    T sum{};
    T comp{};

    void add(const T& v) {
        T y = v - comp;
        T t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    T value() const { return sum; }
};

// integer power by squaring; negative exponents via the reciprocal
inline cplx ipow(cplx z, int e) {
    if (e < 0)
        return 1.0 / ipow(z, -e);
    cplx r(1.0, 0.0);
    cplx b = z;
    while (e > 0) {
        if (e & 1)
            r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

// shortest round-trip decimal form, stable across runs
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

} // namespace asep
