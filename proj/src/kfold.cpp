#include "asep/kfold.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "asep/util.hpp"

namespace asep {

namespace {

double multinomial_multiplicity(const std::vector<int>& idx) {
    // k! / prod(run length factorials) for a non-decreasing index tuple
    double mult = 1.0;
    int n = (int)idx.size();
    for (int j = 2; j <= n; ++j)
        mult *= j;
    int run = 1;
    for (int j = 1; j <= n; ++j) {
        if (j < n && idx[j] == idx[j - 1]) {
            ++run;
        } else {
            for (int r = 2; r <= run; ++r)
                mult /= r;
            run = 1;
        }
    }
    return mult;
}

} // namespace

KfoldResult kfold_integral(const Integrand& f, int k, const QuadNodes& nodes, Symmetry sym) {
    if (k < 1)
        throw std::domain_error("kfold_integral: k must be >= 1");
    const int M = nodes.M;
    std::vector<int> idx(k, 0);
    std::vector<cplx> z(k);
    std::vector<cplx> wpre(k + 1);
    wpre[0] = cplx(1.0, 0.0);

    KahanSum<cplx> acc;
    KahanSum<double> amag;

    auto refresh_from = [&](int d) {
        for (int j = d; j < k; ++j) {
            z[j] = nodes.nodes[idx[j]];
            wpre[j + 1] = wpre[j] * nodes.weights[idx[j]];
        }
    };
    refresh_from(0);

    bool done = false;
    while (!done) {
        cplx term = f(std::span<const cplx>(z.data(), (size_t)k)) * wpre[k];
        if (sym == Symmetry::symmetric)
            term *= multinomial_multiplicity(idx);
        double m = std::abs(term);
        if (!std::isfinite(m))
            throw std::overflow_error("kfold_integral: term magnitude overflowed; "
                                      "reduce R or t");
        acc.add(term);
        amag.add(m);

        // advance odometer (rightmost digit fastest)
        int d = k - 1;
        while (d >= 0) {
            ++idx[d];
            if (idx[d] < M)
                break;
            --d;
        }
        if (d < 0) {
            done = true;
        } else {
            if (sym == Symmetry::symmetric) {
                for (int j = d + 1; j < k; ++j)
                    idx[j] = idx[d]; // non-decreasing restart
            } else {
                for (int j = d + 1; j < k; ++j)
                    idx[j] = 0;
            }
            refresh_from(d);
        }
    }
    return {acc.value(), amag.value()};
}

} // namespace asep
