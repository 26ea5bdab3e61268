#include "asep/step_series.hpp"

#include <cmath>
#include <stdexcept>

#include "asep/qcalc.hpp"
#include "asep/util.hpp"

namespace asep {

namespace {

double factorial(int k) {
    double r = 1.0;
    for (int j = 2; j <= k; ++j)
        r *= j;
    return r;
}

cplx ordered_pair_product(std::span<const cplx> xi, const RateParams& params) {
    cplx r(1.0, 0.0);
    int k = (int)xi.size();
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (i != j)
                r *= pair_factor(xi[i], xi[j], params);
    return r;
}

cplx per_variable_product(std::span<const cplx> xi, int e, const RateParams& params) {
    cplx r(1.0, 0.0);
    for (cplx z : xi)
        r *= ipow(z, e) / ((1.0 - z) * (params.q * z - params.p));
    return r;
}

cplx tuple_product(std::span<const cplx> xi) {
    cplx r(1.0, 0.0);
    for (cplx z : xi)
        r *= z;
    return r;
}

// Symmetric combination sum with running products. The integrands vanish on
// diagonal tuples (zero pair numerator), so summing strictly increasing index
// tuples and scaling by k! reproduces the full M^k tuple sum exactly.
struct CombSum {
    cplx value;
    double abs_sum;
};

template <typename LeafFn>
CombSum comb_sum(int k, const std::vector<cplx>& pp, const std::vector<cplx>& pv,
                 const std::vector<cplx>& zs, LeafFn leaf) {
    const int M = (int)zs.size();
    std::vector<int> idx(k);
    std::vector<cplx> pairpro(k + 1), perpro(k + 1), prodz(k + 1);
    pairpro[0] = perpro[0] = prodz[0] = cplx(1.0, 0.0);

    KahanSum<cplx> acc;
    KahanSum<double> amag;

    auto fill_from = [&](int d) {
        for (int e = d; e < k; ++e) {
            int j = idx[e];
            cplx pm(1.0, 0.0);
            for (int a = 0; a < e; ++a)
                pm *= pp[(size_t)idx[a] * M + j];
            pairpro[e + 1] = pairpro[e] * pm;
            perpro[e + 1] = perpro[e] * pv[j];
            prodz[e + 1] = prodz[e] * zs[j];
        }
    };
    for (int i = 0; i < k; ++i)
        idx[i] = i;
    fill_from(0);

    while (true) {
        cplx term = pairpro[k] * leaf(prodz[k]) * perpro[k];
        acc.add(term);
        amag.add(std::abs(term));

        int d = k - 1;
        while (d >= 0 && idx[d] == M - k + d)
            --d;
        if (d < 0)
            break;
        ++idx[d];
        for (int e = d + 1; e < k; ++e)
            idx[e] = idx[e - 1] + 1;
        fill_from(d);
    }
    return {acc.value(), amag.value()};
}

} // namespace

cplx integrand_jtilde(int x, std::span<const cplx> xi, const RateParams& params) {
    return ordered_pair_product(xi, params) * (1.0 - tuple_product(xi)) *
           per_variable_product(xi, x - 1, params);
}

cplx integrand_j2(int x, std::span<const cplx> xi, const RateParams& params) {
    cplx d = 1.0 - tuple_product(xi);
    return ordered_pair_product(xi, params) * d * d * per_variable_product(xi, x - 1, params);
}

cplx integrand_j(int x, std::span<const cplx> xi, const RateParams& params) {
    return ordered_pair_product(xi, params) * (tuple_product(xi) - 1.0) *
           per_variable_product(xi, x, params);
}

StepTerm step_term(StepStyle style, int k, int x, double t, const RateParams& params,
                   const QuadNodes& qn) {
    if (k < 1)
        throw std::domain_error("step_term: k must be >= 1");
    const int M = qn.M;
    std::vector<cplx> pp((size_t)M * M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
            pp[(size_t)i * M + j] = (i == j) ? cplx(0.0, 0.0)
                                             : pair_factor(qn.nodes[i], qn.nodes[j], params) *
                                                   pair_factor(qn.nodes[j], qn.nodes[i], params);

    int e = (style == StepStyle::cdf) ? x : x - 1;
    std::vector<cplx> pv(M);
    for (int j = 0; j < M; ++j) {
        cplx z = qn.nodes[j];
        pv[j] = ipow(z, e) * std::exp(epsilon(z, params) * t) /
                ((1.0 - z) * (params.q * z - params.p)) * qn.weights[j];
    }

    CombSum s;
    switch (style) {
    case StepStyle::occupation:
        s = comb_sum(k, pp, pv, qn.nodes, [](cplx P) { return 1.0 - P; });
        break;
    case StepStyle::pmf:
        s = comb_sum(k, pp, pv, qn.nodes, [](cplx P) { return (1.0 - P) * (1.0 - P); });
        break;
    case StepStyle::cdf:
        s = comb_sum(k, pp, pv, qn.nodes, [](cplx P) { return P - 1.0; });
        break;
    }

    double kfac = factorial(k);
    double pref = std::pow(params.q, double(k) * k) * q_pochhammer(k, params.tau);
    double sign = (style == StepStyle::occupation) ? ((k % 2 == 1) ? 1.0 : -1.0)
                                                   : ((k % 2 == 0) ? 1.0 : -1.0);
    StepTerm out;
    out.integral = kfac * s.value;        // the bare k-fold quadrature of J
    out.term = sign * pref * s.value;     // q^{k^2}/k! cancels the k! above
    out.abs_sum = pref * s.abs_sum;
    return out;
}

StepTerm tasep_term(int k, int x, double t, const QuadNodes& qn) {
    if (k < 1)
        throw std::domain_error("tasep_term: k must be >= 1");
    const int M = qn.M;
    std::vector<cplx> pp((size_t)M * M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            cplx d = qn.nodes[j] - qn.nodes[i];
            pp[(size_t)i * M + j] = -d * d;
        }
    std::vector<cplx> pv(M);
    for (int j = 0; j < M; ++j) {
        cplx z = qn.nodes[j];
        pv[j] = ipow(z, x) * std::exp((z - 1.0) * t) / ipow(z * (1.0 - z), k) * qn.weights[j];
    }
    CombSum s = comb_sum(k, pp, pv, qn.nodes, [](cplx P) { return P - 1.0; });

    StepTerm out;
    out.integral = factorial(k) * s.value;
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    out.term = sign * s.value;
    out.abs_sum = s.abs_sum;
    return out;
}

namespace {

ContourSpec resolve_contour(const SeriesSpec& series, const RateParams& params) {
    ContourSpec cs = series.contour;
    if (cs.R <= 1.0)
        cs.R = default_radius(params);
    return cs;
}

// direct truncated evaluation at the given (well-conditioned) argument
template <typename TermFn>
SeriesEval run_series(const SeriesSpec& series, TermFn term_at) {
    if (series.k_max < 1 || series.k_max > 6)
        throw config_error("nested series: need 1 <= k_max <= 6 (use the determinant "
                           "engine for deeper truncations)");
    SeriesEval ev;
    KahanSum<double> acc;
    int consec_small = 0;
    double last = 0.0;
    for (int k = 1; k <= series.k_max; ++k) {
        cplx term = term_at(k);
        acc.add(term.real());
        ev.term_mags.push_back(std::abs(term));
        ev.k_used = k;
        last = std::abs(term);
        consec_small = (last < series.term_tol) ? consec_small + 1 : 0;
        if (consec_small >= 2)
            break;
    }
    ev.value = acc.value();
    ev.tail_estimate = 2.0 * last;
    ev.converged = consec_small >= 2 || last < series.term_tol;
    return ev;
}

SeriesEval direct_step_series(StepStyle style, int x, double t, const RateParams& params,
                              const SeriesSpec& series) {
    ContourSpec cs = resolve_contour(series, params);
    QuadNodes qn = make_nodes(cs, params);
    SeriesEval ev = run_series(
        series, [&](int k) { return step_term(style, k, x, t, params, qn).term; });
    ev.m_used = cs.M;
    return ev;
}

SeriesEval reflected(SeriesEval ev) {
    ev.value = 1.0 - ev.value;
    return ev;
}

} // namespace

SeriesEval pmf_step(int x, double t, const RateParams& params, const SeriesSpec& series) {
    if (t < 0.0)
        throw std::domain_error("pmf_step: t must be >= 0");
    if (x == 0) {
        // at the symmetry point the mass is pinned by one distribution value,
        // P(X = 0) = P(X <= 0) - P(X <= -1) = 1 - 2 P(X <= -1), which keeps
        // differencing against cdf_step consistent to roundoff
        SeriesEval ev = direct_step_series(StepStyle::cdf, -1, t, params, series);
        ev.value = 1.0 - 2.0 * ev.value;
        ev.tail_estimate *= 2.0;
        return ev;
    }
    return direct_step_series(StepStyle::pmf, -std::abs(x), t, params, series);
}

SeriesEval cdf_step(int x, double t, const RateParams& params, const SeriesSpec& series) {
    if (t < 0.0)
        throw std::domain_error("cdf_step: t must be >= 0");
    if (x <= -1)
        return direct_step_series(StepStyle::cdf, x, t, params, series);
    return reflected(direct_step_series(StepStyle::cdf, -x - 1, t, params, series));
}

SeriesEval occupation_step(int x, double t, const RateParams& params, const SeriesSpec& series) {
    if (t < 0.0)
        throw std::domain_error("occupation_step: t must be >= 0");
    if (x <= 0)
        return direct_step_series(StepStyle::occupation, x, t, params, series);
    // P(site x occupied) = P(X <= x-1) for the pure step system
    return reflected(direct_step_series(StepStyle::cdf, -x, t, params, series));
}

SeriesEval cdf_tasep(int x, double t, const SeriesSpec& series) {
    if (t < 0.0)
        throw std::domain_error("cdf_tasep: t must be >= 0");
    RateParams tasep = RateParams::from_p(0.0);
    ContourSpec cs = series.contour;
    if (cs.R <= 1.0)
        cs.R = 1.8; // only poles are 0 and 1; a tight circle tames the bare
                    // Vandermonde growth in the numerator
    QuadNodes qn = make_nodes(cs, tasep);
    auto eval_at = [&](int xa) {
        SeriesEval ev = run_series(series, [&](int k) { return tasep_term(k, xa, t, qn).term; });
        ev.m_used = cs.M;
        return ev;
    };
    if (x <= -1)
        return eval_at(x);
    return reflected(eval_at(-x - 1));
}

} // namespace asep
