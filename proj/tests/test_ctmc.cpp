#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"

#include "asep/ctmc.hpp"
#include "asep/errors.hpp"

using namespace asep;

namespace {
const RateParams P03 = RateParams::from_p(0.3);
}

TEST_CASE("state space sizes") {
    CHECK(ctmc_build(P03, -1, 1).size() == 6);
    CHECK(ctmc_build(P03, -5, 5).size() == 2772);
    CHECK(ctmc_build_sites(P03, -8, 8, {1, 2, 3, 4}).size() == 30940);
    CHECK(ctmc_build_single(P03, -2, 2, {0, 1}).size() == 10);
    CHECK_THROWS_AS(ctmc_build(P03, -16, 16), config_error);
}

TEST_CASE("construction rejects bad configurations") {
    CHECK_THROWS_AS(ctmc_build_sites(P03, -2, 2, {0}), config_error);
    CHECK_THROWS_AS(ctmc_build_sites(P03, -2, 2, {3}), config_error);
    CHECK_THROWS_AS(ctmc_build_sites(P03, 1, 4, {2}), config_error);
    CHECK_THROWS_AS(ctmc_build_sites(P03, -2, 2, {1, 1}), config_error);
    CHECK_THROWS_AS(ctmc_build_single(P03, -2, 2, {}), config_error);
}

TEST_CASE("generator bookkeeping") {
    const CtmcSystem sys = ctmc_build(P03, -2, 2);
    REQUIRE(sys.row_ptr.size() == sys.size() + 1);
    for (std::size_t i = 0; i < sys.size(); ++i) {
        double out = 0.0;
        for (std::size_t e = sys.row_ptr[i]; e < sys.row_ptr[i + 1]; ++e) {
            CHECK(sys.rate[e] > 0.0);
            CHECK(sys.col[e] < sys.size());
            CHECK(sys.col[e] != i);
            out += sys.rate[e];
        }
        CHECK(std::abs(out - sys.exit[i]) < 1e-14);
        CHECK(sys.exit[i] <= sys.lambda + 1e-14);
    }
}

TEST_CASE("distribution stays a distribution") {
    const CtmcSystem sys = ctmc_build(P03, -3, 3);
    for (double t : {0.0, 0.3, 2.0}) {
        const std::vector<double> pi = ctmc_distribution(sys, t);
        double mass = std::accumulate(pi.begin(), pi.end(), 0.0);
        CHECK(std::abs(mass - 1.0) < 1e-12);
        for (double v : pi) CHECK(v >= -1e-15);
    }
    const std::vector<double> at0 = ctmc_distribution(sys, 0.0);
    CHECK(at0[sys.init_index] == 1.0);
}

TEST_CASE("tag law at time zero and small times") {
    const CtmcSystem sys = ctmc_build(P03, -2, 2);
    const CtmcPmf at0 = ctmc_pmf(sys, 0.0);
    CHECK(at0.pmf.at(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(at0.boundary_mass == 0.0);

    // both neighbours of the tag open at rate q
    const double t = 1e-4;
    const CtmcPmf small = ctmc_pmf(sys, t);
    CHECK(std::abs(small.pmf.at(1) / t - P03.q) < 1e-3);
    CHECK(std::abs(small.pmf.at(-1) / t - P03.q) < 1e-3);
}

TEST_CASE("single particle follows the modified Bessel law") {
    const CtmcSystem sys = ctmc_build_single(P03, -10, 10, {0});
    const double t = 1.0;
    const CtmcOcc occ = ctmc_occupation(sys, t);
    for (int x = -6; x <= 6; ++x) {
        const double want = std::exp(-t) * std::pow(P03.p / P03.q, 0.5 * x) *
                            std::cyl_bessel_i(std::abs(x), 2.0 * std::sqrt(P03.p * P03.q) * t);
        CHECK(std::abs(occ.occ_first.at(x) - want) < 1e-8);
    }
}

TEST_CASE("coupled chain equals the difference of plain chains") {
    // the tagged-particle law is exactly the occupation difference between
    // the chain started from {0} u Y and the chain started from Y, on the
    // same closed window
    const std::vector<int> Y{1, 2};
    const int lo = -6, hi = 6;
    const double t = 0.4;
    const CtmcPmf two = ctmc_pmf(ctmc_build_sites(P03, lo, hi, Y), t);
    std::vector<int> Yz{0};
    Yz.insert(Yz.end(), Y.begin(), Y.end());
    const CtmcOcc zeta = ctmc_occupation(ctmc_build_single(P03, lo, hi, Yz), t);
    const CtmcOcc eta = ctmc_occupation(ctmc_build_single(P03, lo, hi, Y), t);

    double total_diff = 0.0;
    for (int x = lo; x <= hi; ++x) {
        const double diff = zeta.occ_first.at(x) - eta.occ_first.at(x);
        CHECK(diff >= -1e-12);
        CHECK(std::abs(diff - two.pmf.at(x)) < 1e-10);
        total_diff += diff;
    }
    CHECK(std::abs(total_diff - 1.0) < 1e-10);
}

TEST_CASE("boundary leakage grows with time") {
    const CtmcSystem sys = ctmc_build(P03, -4, 4);
    const double early = ctmc_pmf(sys, 0.2).boundary_mass;
    const double late = ctmc_pmf(sys, 3.0).boundary_mass;
    CHECK(early < 1e-3);
    CHECK(late > early);
}
