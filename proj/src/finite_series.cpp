#include "asep/finite_series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "asep/kfold.hpp"
#include "asep/qcalc.hpp"
#include "asep/util.hpp"

namespace asep {

namespace {

// k-fold tuple sum of I(x,k,xi) * prod_i xi_i^{-s_i} over all M^k index
// tuples, xi_i bound to s_i in ascending order. Running products down the
// tuple tree keep the per-leaf cost O(k).
KfoldResult ifold_sum(int x, const std::vector<int>& S, double t, const RateParams& params,
                      const QuadNodes& qn) {
    const int M = qn.M;
    const int k = (int)S.size();

    std::vector<cplx> pairtab((size_t)M * M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
            pairtab[(size_t)i * M + j] = pair_factor(qn.nodes[i], qn.nodes[j], params);

    // per-depth node factor: xi^{x-1} e^{eps t} / (1 - xi) * xi^{-s_d} * w
    std::vector<cplx> fac((size_t)k * M);
    for (int j = 0; j < M; ++j) {
        cplx xi = qn.nodes[j];
        cplx base = ipow(xi, x - 1) * std::exp(epsilon(xi, params) * t) / (1.0 - xi) *
                    qn.weights[j];
        for (int d = 0; d < k; ++d)
            fac[(size_t)d * M + j] = base * ipow(xi, -S[d]);
    }

    std::vector<int> idx(k, 0);
    std::vector<cplx> pairpro(k + 1), perpro(k + 1), prodz(k + 1);
    pairpro[0] = perpro[0] = prodz[0] = cplx(1.0, 0.0);

    KahanSum<cplx> acc;
    KahanSum<double> amag;

    auto fill_from = [&](int d) {
        for (int e = d; e < k; ++e) {
            int j = idx[e];
            cplx pm(1.0, 0.0);
            for (int a = 0; a < e; ++a)
                pm *= pairtab[(size_t)idx[a] * M + j];
            pairpro[e + 1] = pairpro[e] * pm;
            perpro[e + 1] = perpro[e] * fac[(size_t)e * M + j];
            prodz[e + 1] = prodz[e] * qn.nodes[j];
        }
    };
    fill_from(0);

    while (true) {
        cplx term = pairpro[k] * (1.0 - prodz[k]) * perpro[k];
        acc.add(term);
        amag.add(std::abs(term));

        int d = k - 1;
        while (d >= 0 && ++idx[d] == M)
            --d;
        if (d < 0)
            break;
        for (int e = d + 1; e < k; ++e)
            idx[e] = 0;
        fill_from(d);
    }
    return {acc.value(), amag.value()};
}

struct AssembledSeries {
    cplx total;
    std::vector<double> term_mags;
};

// shared evaluator: sum over k and over k-subsets S of `sites` (lexicographic)
// of coef(k) * tau^{sigma(S,sites)} * ifold_sum; coef supplied per series
template <typename CoefFn>
AssembledSeries subset_series(const std::vector<int>& sites, int x, double t,
                              const RateParams& params, const QuadNodes& qn, CoefFn coef) {
    const int N = (int)sites.size();
    KahanSum<cplx> total;
    std::vector<double> mags;
    for (int k = 1; k <= N; ++k) {
        double ck = coef(k);
        if (ck == 0.0) {
            mags.push_back(0.0);
            continue;
        }
        KahanSum<cplx> order;
        std::vector<int> comb(k);
        for (int i = 0; i < k; ++i)
            comb[i] = i;
        while (true) {
            std::vector<int> S(k);
            for (int i = 0; i < k; ++i)
                S[i] = sites[comb[i]];
            double w = ck * std::pow(params.tau, sigma(S, sites));
            order.add(w * ifold_sum(x, S, t, params, qn).value);

            int i = k - 1;
            while (i >= 0 && comb[i] == N - k + i)
                --i;
            if (i < 0)
                break;
            ++comb[i];
            for (int j = i + 1; j < k; ++j)
                comb[j] = comb[j - 1] + 1;
        }
        total.add(order.value());
        mags.push_back(std::abs(order.value()));
    }
    return {total.value(), mags};
}

// run the series, doubling M (cap 512) while the imaginary residual betrays
// an under-resolved quadrature
template <typename CoefFn>
FiniteEval converged_series(const std::vector<int>& sites, int x, double t,
                            const RateParams& params, const ContourSpec& spec, CoefFn coef) {
    ContourSpec cs = spec;
    while (true) {
        AssembledSeries s = subset_series(sites, x, t, params, make_nodes(cs, params), coef);
        double ir = std::abs(s.total.imag());
        if (ir <= 1e-9 || cs.M >= 512)
            return {s.total.real(), ir, s.term_mags};
        cs.M = std::min(512, cs.M * 2);
    }
}

} // namespace

void InitialConfig::validate() const {
    if (sites.empty())
        throw config_error("InitialConfig: need at least one site");
    if ((int)sites.size() > 12)
        throw config_error("InitialConfig: |Y| capped at 12, got " +
                           std::to_string(sites.size()));
    for (size_t i = 0; i < sites.size(); ++i) {
        if (sites[i] < 1)
            throw config_error("InitialConfig: sites must be >= 1, got " +
                               std::to_string(sites[i]));
        if (i > 0 && sites[i] <= sites[i - 1])
            throw config_error("InitialConfig: sites must be strictly increasing");
    }
}

std::vector<int> InitialConfig::with_zero() const {
    std::vector<int> r;
    r.push_back(0);
    r.insert(r.end(), sites.begin(), sites.end());
    return r;
}

int sigma(const std::vector<int>& S, const std::vector<int>& Y) {
    for (int s : S)
        if (!std::binary_search(Y.begin(), Y.end(), s))
            throw std::domain_error("sigma: S must be a subset of Y");
    int n = 0;
    for (int s : S)
        for (int y : Y)
            if (y <= s)
                ++n;
    return n;
}

double c_mk(int m, int k, const RateParams& params) {
    if (m < 1 || k < 1)
        throw std::domain_error("c_mk: m and k must be >= 1");
    if (params.tau <= 0.0)
        throw std::domain_error("c_mk: tau must be > 0");
    if (m > k)
        return 0.0;
    double tau = params.tau;
    double sign = (m % 2 == 0) ? -1.0 : 1.0;
    return std::pow(params.q, 0.5 * k * (k - 1)) * sign * std::pow(tau, 0.5 * m * (m - 1)) *
           std::pow(tau, -double(k) * m) * q_binomial(k - 1, k - m, tau);
}

FiniteEval position_pmf_finite(const InitialConfig& Y, int m, int x, double t,
                               const RateParams& params, const ContourSpec& spec) {
    Y.validate();
    if (m < 1 || m > (int)Y.sites.size())
        throw std::domain_error("position_pmf_finite: need 1 <= m <= |Y|");
    return converged_series(Y.sites, x, t, params, spec,
                            [&](int k) { return c_mk(m, k, params); });
}

FiniteEval occupation_prob_sites(const std::vector<int>& sites, int x, double t,
                                 const RateParams& params, const ContourSpec& spec) {
    return converged_series(sites, x, t, params, spec, [&](int k) {
        return std::pow(params.q, 0.5 * k * (k - 1)) * collapsed_m_sum(k, params.tau);
    });
}

FiniteEval occupation_prob_finite(const InitialConfig& Y, int x, double t,
                                  const RateParams& params, const ContourSpec& spec) {
    Y.validate();
    return occupation_prob_sites(Y.sites, x, t, params, spec);
}

FiniteEval second_class_pmf_finite(const InitialConfig& Y, int x, double t,
                                   const RateParams& params, const ContourSpec& spec) {
    Y.validate();
    FiniteEval with0 = occupation_prob_sites(Y.with_zero(), x, t, params, spec);
    FiniteEval plain = occupation_prob_sites(Y.sites, x, t, params, spec);
    FiniteEval r;
    r.value = with0.value - plain.value;
    r.imag_resid = std::max(with0.imag_resid, plain.imag_resid);
    r.term_mags.resize(std::max(with0.term_mags.size(), plain.term_mags.size()), 0.0);
    for (size_t i = 0; i < r.term_mags.size(); ++i) {
        double a = i < with0.term_mags.size() ? with0.term_mags[i] : 0.0;
        double b = i < plain.term_mags.size() ? plain.term_mags[i] : 0.0;
        r.term_mags[i] = a + b;
    }
    return r;
}

double leading_coefficient(int N, const RateParams& params) {
    if (N < 1)
        throw std::domain_error("leading_coefficient: N must be >= 1");
    double sign = (N % 2 == 0) ? -1.0 : 1.0;
    double prod = 1.0;
    for (int j = 1; j <= N - 1; ++j)
        prod *= std::pow(params.q, j) - std::pow(params.p, j);
    return sign * prod;
}

double assembled_leading_prefactor(int N, const RateParams& params) {
    if (N < 1)
        throw std::domain_error("assembled_leading_prefactor: N must be >= 1");
    std::vector<int> Y(N);
    for (int i = 0; i < N; ++i)
        Y[i] = i + 1;
    return std::pow(params.q, 0.5 * N * (N - 1)) * collapsed_m_sum(N, params.tau) *
           std::pow(params.tau, sigma(Y, Y));
}

} // namespace asep
