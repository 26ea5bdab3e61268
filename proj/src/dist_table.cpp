#include "asep/dist_table.hpp"

#include <cmath>

#include "asep/util.hpp"

namespace asep {

namespace {

struct SweepEval {
    detail::FredholmSweep sweep;
    const SeriesSpec& series;

    SweepEval(double t, const RateParams& params, const SeriesSpec& s)
        : sweep(params, t, s.contour.R > 1.0 ? s.contour.R : default_radius(params), s.k_max),
          series(s) {}

    SeriesEval cdf_at(int x) {
        int y = (x <= -1) ? x : -x - 1;
        SeriesEval ev = detail::gated_cdf_direct(y, sweep, series);
        if (x >= 0)
            ev.value = 1.0 - ev.value;
        return ev;
    }
};

void merge_diag(DistTable& tb, const SeriesEval& ev) {
    tb.m_used = std::max(tb.m_used, ev.m_used);
    tb.k_used = std::max(tb.k_used, ev.k_used);
    tb.tail_max = std::max(tb.tail_max, ev.tail_estimate);
    if (!ev.converged)
        ++tb.unconverged;
    if (ev.term_mags.size() > tb.term_mags.size())
        tb.term_mags.resize(ev.term_mags.size(), 0.0);
    for (size_t i = 0; i < ev.term_mags.size(); ++i)
        tb.term_mags[i] = std::max(tb.term_mags[i], ev.term_mags[i]);
}

} // namespace

DistTable build_cdf_table(int x_min, int x_max, double t, const RateParams& params,
                          const SeriesSpec& series) {
    if (x_min > x_max)
        throw config_error("build_cdf_table: x_min > x_max");
    SweepEval se(t, params, series);
    DistTable tb;
    tb.t = t;
    tb.params = params;
    tb.is_cdf = true;
    for (int x = x_min; x <= x_max; ++x) {
        SeriesEval ev = se.cdf_at(x);
        tb.xs.push_back(x);
        tb.values.push_back(ev.value);
        merge_diag(tb, ev);
    }
    for (size_t i = 1; i < tb.values.size(); ++i)
        tb.monotone_defect = std::max(tb.monotone_defect, tb.values[i - 1] - tb.values[i]);
    tb.monotone_defect = std::max(tb.monotone_defect, 0.0);
    return tb;
}

DistTable build_pmf_table(int x_min, int x_max, double t, const RateParams& params,
                          const SeriesSpec& series) {
    if (x_min > x_max)
        throw config_error("build_pmf_table: x_min > x_max");
    SweepEval se(t, params, series);
    DistTable tb;
    tb.t = t;
    tb.params = params;
    tb.is_cdf = false;
    SeriesEval prev = se.cdf_at(x_min - 1);
    merge_diag(tb, prev);
    KahanSum<double> mass;
    for (int x = x_min; x <= x_max; ++x) {
        SeriesEval cur = se.cdf_at(x);
        tb.xs.push_back(x);
        tb.values.push_back(cur.value - prev.value);
        mass.add(cur.value - prev.value);
        merge_diag(tb, cur);
        prev = cur;
    }
    tb.mass_defect = std::abs(1.0 - mass.value());
    return tb;
}

} // namespace asep
