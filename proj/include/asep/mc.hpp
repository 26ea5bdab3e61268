#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "asep/rates.hpp"

namespace asep {

// Event-driven two-class simulation on a closed window. Empty first_sites
// means the step block {1..hi}; the second-class particle always starts at 0.
struct McConfig {
    RateParams params;
    double t = 1.0;
    int lo = -8;
    int hi = 8;
    std::uint64_t n_paths = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::vector<int> first_sites;  // optional explicit Y
    bool check_invariants = false; // assert the coupled-count identity per event
};

struct McResult {
    std::map<int, std::uint64_t> counts; // final X(t) histogram
    std::map<int, double> pmf_hat;
    std::map<int, double> occ_first; // per-site first-class occupation frequency
    std::map<int, double> occ_any;   // per-site any-particle occupation frequency
    std::uint64_t n_paths = 0;
    std::uint64_t seed = 0;
    double boundary_touch_rate = 0.0;

    // 99% normal-approximation half-width for the bin at x
    double ci_halfwidth(int x) const;
};

McResult mc_run(const McConfig& cfg);

// single-class run from the given site list; returns occupation frequencies
struct McOccResult {
    std::map<int, double> occ;
    std::map<int, std::uint64_t> counts;
    std::uint64_t n_paths = 0;
    std::uint64_t seed = 0;
    double boundary_touch_rate = 0.0;
    double ci_halfwidth(int x) const;
};

McOccResult mc_occupation(const RateParams& params, double t, const std::vector<int>& sites,
                          int lo, int hi, std::uint64_t n_paths, std::uint64_t seed,
                          int threads = 1);

} // namespace asep
