#include <cmath>
#include <vector>

#include "doctest.h"

#include "asep/ctmc.hpp"
#include "asep/mc.hpp"

using namespace asep;

namespace {
const RateParams P03 = RateParams::from_p(0.3);

McConfig base_config() {
    McConfig cfg;
    cfg.params = P03;
    cfg.t = 0.5;
    cfg.lo = -6;
    cfg.hi = 6;
    cfg.n_paths = 4000;
    cfg.seed = 11;
    return cfg;
}
}

TEST_CASE("paths are frozen at t = 0") {
    McConfig cfg = base_config();
    cfg.t = 0.0;
    cfg.n_paths = 100;
    const McResult r = mc_run(cfg);
    REQUIRE(r.counts.size() == 1);
    CHECK(r.counts.at(0) == 100);
    CHECK(r.pmf_hat.at(0) == 1.0);
    CHECK(r.boundary_touch_rate == 0.0);
    CHECK(r.ci_halfwidth(0) == 0.0);
}

TEST_CASE("thread layout does not change the sample") {
    McConfig cfg = base_config();
    cfg.check_invariants = true;
    const McResult one = mc_run(cfg);
    cfg.threads = 3;
    const McResult three = mc_run(cfg);
    CHECK(one.counts == three.counts);
    CHECK(one.boundary_touch_rate == three.boundary_touch_rate);
    CHECK(one.occ_first == three.occ_first);

    cfg.threads = 1;
    const McResult again = mc_run(cfg);
    CHECK(one.counts == again.counts);
}

TEST_CASE("seed changes the sample") {
    McConfig cfg = base_config();
    const McResult a = mc_run(cfg);
    cfg.seed = 12;
    const McResult b = mc_run(cfg);
    CHECK(a.counts != b.counts);
}

TEST_CASE("particle counts are conserved along every path") {
    McConfig cfg = base_config();
    cfg.t = 2.0;
    cfg.lo = -4;
    cfg.hi = 4;
    cfg.n_paths = 500;
    cfg.check_invariants = true;
    CHECK_NOTHROW(mc_run(cfg));

    const McResult r = mc_run(cfg);
    // each path leaves exactly (#firsts + 1) occupied cells
    double occupied = 0.0;
    for (const auto& [x, v] : r.occ_any) occupied += v;
    CHECK(std::abs(occupied - 5.0) < 1e-9);
    double mass = 0.0;
    for (const auto& [x, v] : r.pmf_hat) mass += v;
    CHECK(std::abs(mass - 1.0) < 1e-12);
}

TEST_CASE("estimates track the exact chain") {
    McConfig cfg = base_config();
    cfg.t = 0.4;
    cfg.lo = -3;
    cfg.hi = 3;
    cfg.n_paths = 60000;
    cfg.seed = 5;
    const McResult mc = mc_run(cfg);
    const CtmcPmf exact = ctmc_pmf(ctmc_build(P03, -3, 3), 0.4);
    for (int x = -3; x <= 3; ++x) {
        auto it = mc.pmf_hat.find(x);
        const double hat = it == mc.pmf_hat.end() ? 0.0 : it->second;
        const double hw = std::max(mc.ci_halfwidth(x), 1e-4);
        CHECK(std::abs(hat - exact.pmf.at(x)) < 4.0 * hw);
    }
}

TEST_CASE("boundary contact grows with time") {
    McConfig cfg = base_config();
    cfg.lo = -3;
    cfg.hi = 3;
    cfg.n_paths = 3000;
    cfg.t = 0.1;
    const double early = mc_run(cfg).boundary_touch_rate;
    cfg.t = 4.0;
    const double late = mc_run(cfg).boundary_touch_rate;
    CHECK(early < 0.05);
    CHECK(late > 0.5);
}

TEST_CASE("single-class sampler reproduces the one-particle law") {
    const double t = 0.5;
    const McOccResult r = mc_occupation(P03, t, {0}, -8, 8, 50000, 9, 1);
    for (int x = -3; x <= 3; ++x) {
        const double want = std::exp(-t) * std::pow(P03.p / P03.q, 0.5 * x) *
                            std::cyl_bessel_i(std::abs(x), 2.0 * std::sqrt(P03.p * P03.q) * t);
        const double hw = std::max(r.ci_halfwidth(x), 1e-4);
        CHECK(std::abs(r.occ.at(x) - want) < 4.0 * hw);
    }
}
