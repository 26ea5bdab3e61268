#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "asep/rates.hpp"

namespace asep {

// Exact finite-window chain. States are encoded as (tag_position << width) | first_mask
// for two-class systems and as the bare mask for single-class ones; keys are kept
// sorted so neighbours resolve by binary search. Transitions live in CSR arrays.
struct CtmcSystem {
    RateParams params;
    int lo = 0;
    int hi = 0;
    bool two_class = false;
    std::vector<int> first_sites;

    std::vector<std::uint64_t> keys;
    std::vector<std::size_t> row_ptr;
    std::vector<std::uint32_t> col;
    std::vector<double> rate;
    std::vector<double> exit;
    double lambda = 0.0;
    std::size_t init_index = 0;

    int width() const { return hi - lo + 1; }
    std::size_t size() const { return keys.size(); }
};

// step block {1..hi} plus the tagged particle at 0
CtmcSystem ctmc_build(const RateParams& params, int lo, int hi);

// explicit first-class sites plus the tagged particle at 0
CtmcSystem ctmc_build_sites(const RateParams& params, int lo, int hi,
                            const std::vector<int>& first_sites);

// plain single-class chain from the given sites
CtmcSystem ctmc_build_single(const RateParams& params, int lo, int hi,
                             const std::vector<int>& sites);

// distribution over states at time t via uniformization, Poisson tail below 1e-13
std::vector<double> ctmc_distribution(const CtmcSystem& sys, double t);

struct CtmcPmf {
    std::map<int, double> pmf;    // law of the tagged particle position
    double boundary_mass = 0.0;   // probability an edge cell differs from its initial contents
};
CtmcPmf ctmc_pmf(const CtmcSystem& sys, double t);

struct CtmcOcc {
    std::map<int, double> occ_first;
    std::map<int, double> occ_any;
    double boundary_mass = 0.0;
};
CtmcOcc ctmc_occupation(const CtmcSystem& sys, double t);

} // namespace asep
