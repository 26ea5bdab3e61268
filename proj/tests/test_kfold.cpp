#include <cmath>
#include <complex>
#include <stdexcept>

#include "doctest.h"

#include "asep/contour.hpp"
#include "asep/kfold.hpp"

using namespace asep;

namespace {
const RateParams P03 = RateParams::from_p(0.3);
const QuadNodes QN = make_nodes(ContourSpec{2.0, 48}, P03);
}

TEST_CASE("single fold picks out residues") {
    const KfoldResult pole = kfold_integral([](std::span<const cplx> xi) { return 1.0 / xi[0]; },
                                            1, QN);
    CHECK(std::abs(pole.value - 1.0) < 1e-14);

    const KfoldResult entire = kfold_integral([](std::span<const cplx>) { return cplx(1.0); },
                                              1, QN);
    CHECK(std::abs(entire.value) < 1e-14);

    const KfoldResult high = kfold_integral(
        [](std::span<const cplx> xi) { return 1.0 / (xi[0] * xi[0]); }, 1, QN);
    CHECK(std::abs(high.value) < 1e-14);
}

TEST_CASE("antisymmetric integrands vanish under the full tuple sum") {
    const KfoldResult r = kfold_integral(
        [](std::span<const cplx> xi) { return (xi[0] - xi[1]) / (xi[0] * xi[1]); }, 2, QN,
        Symmetry::general);
    CHECK(std::abs(r.value) <= 1e-13 * std::max(1.0, r.abs_sum));
}

TEST_CASE("permutation reduction matches the full sum") {
    const auto f = [](std::span<const cplx> xi) {
        cplx prod = 1.0;
        for (const cplx& x : xi) prod *= 1.0 / x + x / 7.0;
        cplx sum = 0.0;
        for (const cplx& x : xi) sum += x;
        return prod / (3.0 + sum / 11.0);
    };
    for (int k : {2, 3}) {
        const KfoldResult full = kfold_integral(f, k, QN, Symmetry::general);
        const KfoldResult sym = kfold_integral(f, k, QN, Symmetry::symmetric);
        CHECK(std::abs(full.value - sym.value) <=
              1e-12 * std::max(1.0, std::abs(full.value)));
        CHECK(std::abs(full.abs_sum - sym.abs_sum) <= 1e-9 * full.abs_sum);
    }
}

TEST_CASE("separable product factorizes") {
    // (contour integral of 1/xi)^3 = 1
    const KfoldResult r = kfold_integral(
        [](std::span<const cplx> xi) { return 1.0 / (xi[0] * xi[1] * xi[2]); }, 3, QN);
    CHECK(std::abs(r.value - 1.0) < 1e-13);
}

TEST_CASE("non-finite terms are reported, not absorbed") {
    CHECK_THROWS_AS(kfold_integral(
                        [](std::span<const cplx> xi) {
                            return std::exp(cplx(1e4, 0.0) * xi[0]);
                        },
                        1, QN),
                    std::overflow_error);
}
