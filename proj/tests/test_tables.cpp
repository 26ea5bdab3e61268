#include <cmath>

#include "doctest.h"

#include "asep/dist_table.hpp"
#include "asep/step_series.hpp"

using namespace asep;

namespace {
const RateParams P03 = RateParams::from_p(0.3);
}

TEST_CASE("distribution table shape") {
    const SeriesSpec ss{};
    const DistTable cdf = build_cdf_table(-8, 8, 1.0, P03, ss);
    REQUIRE(cdf.xs.size() == 17);
    CHECK(cdf.is_cdf);
    CHECK(cdf.monotone_defect <= 1e-8);
    CHECK(cdf.unconverged == 0);
    CHECK(cdf.k_used >= 1);
    CHECK(cdf.m_used >= 64);
    for (double v : cdf.values) {
        CHECK(v >= -1e-9);
        CHECK(v <= 1.0 + 1e-9);
    }
    CHECK(cdf.values.front() < 0.05);
    CHECK(cdf.values.back() > 0.95);
}

TEST_CASE("mass defect on the default window") {
    const SeriesSpec ss{};
    for (double t : {0.5, 2.0}) {
        const DistTable pmf = build_pmf_table(-8, 8, t, P03, ss);
        CHECK(!pmf.is_cdf);
        CHECK(pmf.mass_defect < 1e-4);
        for (double v : pmf.values) CHECK(v >= -1e-9);
    }
}

TEST_CASE("table at time zero is the point mass") {
    const SeriesSpec ss{};
    const DistTable pmf = build_pmf_table(-3, 3, 0.0, P03, ss);
    for (std::size_t i = 0; i < pmf.xs.size(); ++i)
        CHECK(std::abs(pmf.values[i] - (pmf.xs[i] == 0 ? 1.0 : 0.0)) < 1e-9);
}

TEST_CASE("differencing ties the two series together") {
    // PMF computed from its own series against the difference of the
    // distribution-function series
    const SeriesSpec ss{};
    for (double t : {0.5, 1.0})
        for (int x = -4; x <= 4; ++x) {
            const double direct = pmf_step(x, t, P03, ss).value;
            const double diff = cdf_step(x, t, P03, ss).value - cdf_step(x - 1, t, P03, ss).value;
            CHECK(std::abs(direct - diff) < 1e-10);
        }
}

TEST_CASE("tables are symmetric in the site argument") {
    const SeriesSpec ss{};
    const DistTable pmf = build_pmf_table(-5, 5, 1.0, P03, ss);
    for (int x = 1; x <= 5; ++x) {
        const double left = pmf.values[-x + 5];
        const double right = pmf.values[x + 5];
        CHECK(std::abs(left - right) < 1e-12);
    }
}

TEST_CASE("contour radius does not matter") {
    SeriesSpec a{};
    a.contour.R = 2.0;
    SeriesSpec b{};
    b.contour.R = 3.0;
    const DistTable ta = build_cdf_table(-5, 5, 1.0, P03, a);
    const DistTable tb = build_cdf_table(-5, 5, 1.0, P03, b);
    for (std::size_t i = 0; i < ta.values.size(); ++i)
        CHECK(std::abs(ta.values[i] - tb.values[i]) < 1e-8);
}

TEST_CASE("table agrees with the plain series evaluator") {
    const SeriesSpec ss{};
    const DistTable cdf = build_cdf_table(-4, 4, 0.5, P03, ss);
    for (std::size_t i = 0; i < cdf.xs.size(); ++i)
        CHECK(std::abs(cdf.values[i] - cdf_step(cdf.xs[i], 0.5, P03, ss).value) < 1e-8);
}
