#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "asep/ctmc.hpp"
#include "asep/errors.hpp"
#include "asep/finite_series.hpp"

using namespace asep;

namespace {
const RateParams P03 = RateParams::from_p(0.3);
// wide contour: evaluation to the right of the sites puts positive powers on
// the pairwise pole ring, see wide_radius
const ContourSpec CS{3.0, 48};
}

TEST_CASE("site ordering statistic") {
    CHECK(sigma({1, 3}, {1, 2, 3, 4}) == 4);
    CHECK(sigma({}, {1, 2}) == 0);
    CHECK(sigma({1, 2, 3}, {1, 2, 3}) == 6);
    CHECK_THROWS_AS(sigma({5}, {1, 2}), std::domain_error);
}

TEST_CASE("initial configuration validation") {
    CHECK_THROWS_AS((InitialConfig{{}}.validate()), config_error);
    CHECK_THROWS_AS((InitialConfig{{2, 1}}.validate()), config_error);
    CHECK_THROWS_AS((InitialConfig{{0, 1}}.validate()), config_error);
    CHECK_THROWS_AS((InitialConfig{{1, 1}}.validate()), config_error);
    CHECK_NOTHROW(InitialConfig{{1, 2, 4}}.validate());
    CHECK(InitialConfig{{1, 2}}.with_zero() == std::vector<int>{0, 1, 2});
    std::vector<int> big;
    for (int i = 1; i <= 13; ++i) big.push_back(i);
    CHECK_THROWS_AS((InitialConfig{big}.validate()), config_error);
}

TEST_CASE("series coefficient values") {
    CHECK(c_mk(1, 1, P03) == doctest::Approx(7.0 / 3.0).epsilon(1e-14));
    const double tau = P03.tau;
    CHECK(c_mk(3, 3, P03) ==
          doctest::Approx(std::pow(P03.q, 3) * std::pow(tau, -6.0)).epsilon(1e-13));
    CHECK(c_mk(2, 1, P03) == 0.0);
    CHECK(c_mk(5, 3, P03) == 0.0);
    CHECK_THROWS_AS(c_mk(0, 1, P03), std::domain_error);
}

TEST_CASE("frozen start: nothing has moved at t = 0") {
    const InitialConfig Y{{1, 3, 4}};
    for (int m = 1; m <= 3; ++m)
        for (int x = -2; x <= 6; ++x) {
            const double want = x == Y.sites[m - 1] ? 1.0 : 0.0;
            const FiniteEval ev = position_pmf_finite(Y, m, x, 0.0, P03, CS);
            CHECK(std::abs(ev.value - want) < 1e-10);
            CHECK(ev.imag_resid < 1e-10);
        }
    for (int x = -2; x <= 6; ++x) {
        const bool in = x == 1 || x == 3 || x == 4;
        CHECK(std::abs(occupation_prob_finite(Y, x, 0.0, P03, CS).value - (in ? 1.0 : 0.0)) <
              1e-10);
        CHECK(std::abs(second_class_pmf_finite(Y, x, 0.0, P03, CS).value - (x == 0 ? 1.0 : 0.0)) <
              1e-10);
    }
}

TEST_CASE("position law against the exact chain") {
    // law of the m-th leftmost particle, read off the chain's state keys
    const InitialConfig Y{{1, 3}};
    const int lo = -7, hi = 9;
    const CtmcSystem sys = ctmc_build_single(P03, lo, hi, Y.sites);
    const double t = 0.4;
    const std::vector<double> pi = ctmc_distribution(sys, t);

    for (int m = 1; m <= 2; ++m) {
        std::vector<double> law(hi - lo + 1, 0.0);
        for (std::size_t s = 0; s < sys.size(); ++s) {
            std::uint64_t mask = sys.keys[s];
            int seen = 0, pos = -1;
            for (int j = 0; j < sys.width(); ++j)
                if ((mask >> j) & 1u) {
                    ++seen;
                    if (seen == m) {
                        pos = j;
                        break;
                    }
                }
            law[pos] += pi[s];
        }
        for (int x = -4; x <= 6; ++x) {
            const double want = law[x - lo];
            const double got = position_pmf_finite(Y, m, x, t, P03, CS).value;
            CHECK(std::abs(got - want) < 1e-7);
        }
    }
}

TEST_CASE("occupation law against the exact chain") {
    const std::vector<int> sites{1, 2};
    const CtmcSystem sys = ctmc_build_single(P03, -7, 9, sites);
    const CtmcOcc occ = ctmc_occupation(sys, 0.4);
    for (int x = -4; x <= 6; ++x) {
        const double got = occupation_prob_sites(sites, x, 0.4, P03, CS).value;
        CHECK(std::abs(got - occ.occ_first.at(x)) < 1e-7);
    }
}

TEST_CASE("tagged particle law against the exact chain") {
    const InitialConfig Y{{1, 2}};
    const CtmcSystem sys = ctmc_build_sites(P03, -7, 8, Y.sites);
    const CtmcPmf oracle = ctmc_pmf(sys, 0.4);
    for (int x = -5; x <= 6; ++x) {
        const double got = second_class_pmf_finite(Y, x, 0.4, P03, CS).value;
        CHECK(std::abs(got - oracle.pmf.at(x)) < 1e-7);
        CHECK(got > -1e-9);
    }
    // [-8, 8] holds all but ~1e-9 of the law at this horizon (eight jumps
    // against an exponential clock); [-5, 6] would miss a 5e-7 tail
    double mass = 0.0;
    for (int x = -8; x <= 8; ++x) mass += second_class_pmf_finite(Y, x, 0.4, P03, CS).value;
    CHECK(std::abs(mass - 1.0) < 1e-7);
}

TEST_CASE("leading coefficient closed form") {
    CHECK(leading_coefficient(2, P03) == doctest::Approx(-0.4).epsilon(1e-14));
    CHECK(leading_coefficient(3, P03) == doctest::Approx(0.16).epsilon(1e-13));
    for (double p : {0.1, 0.3, 0.45}) {
        const RateParams pr = RateParams::from_p(p);
        for (int n = 1; n <= 6; ++n) {
            const double want = leading_coefficient(n, pr);
            const double got = assembled_leading_prefactor(n, pr);
            CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
        }
    }
}
