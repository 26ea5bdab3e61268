#pragma once

#include <vector>

#include "asep/fredholm.hpp"
#include "asep/rates.hpp"
#include "asep/step_series.hpp"

namespace asep {

// Distribution table over a site window with the evaluation diagnostics the
// numbers came with. values[i] corresponds to xs[i] = x_min + i.
struct DistTable {
    std::vector<int> xs;
    std::vector<double> values;
    double t = 0.0;
    RateParams params{};
    bool is_cdf = false;

    double mass_defect = 0.0;      // PMF tables: |1 - sum over the window|
    double monotone_defect = 0.0;  // CDF tables: worst decreasing step
    int m_used = 0;                // largest node count the gate escalated to
    int k_used = 0;                // deepest accepted series order
    double tail_max = 0.0;         // worst truncation-tail estimate
    int unconverged = 0;           // sites flagged unconverged
    std::vector<double> term_mags; // max |term_k| across the sweep
};

// Production tables through the determinant engine; the coefficient cache is
// shared across the sweep so each site argument is factorized once per node
// resolution.
DistTable build_cdf_table(int x_min, int x_max, double t, const RateParams& params,
                          const SeriesSpec& series);
DistTable build_pmf_table(int x_min, int x_max, double t, const RateParams& params,
                          const SeriesSpec& series);

} // namespace asep
