#pragma once

#include <span>
#include <vector>

#include "asep/contour.hpp"
#include "asep/kfold.hpp"
#include "asep/rates.hpp"

namespace asep {

// Truncation policy for the k-series. contour.R <= 1 means "pick the radius
// from the rates" (the fixed default 2 stops being admissible near p = 1/2).
struct SeriesSpec {
    int k_max = 6;
    double term_tol = 1e-10;
    ContourSpec contour{0.0, 48};
};

struct SeriesEval {
    double value = 0.0;
    bool converged = false;
    int k_used = 0;
    double tail_estimate = 0.0;
    int m_used = 0;
    std::vector<double> term_mags;
};

// The three step-initial-condition integrands, exactly as the series are
// written: ordered-pair product over i != j of pair_factor, a (1 - prod xi)
// style factor, and per-variable xi^e / ((1 - xi)(q xi - p)). The time factor
// prod_i e^{eps(xi_i) t} is supplied by the caller.
//   jtilde: (1 - prod xi),   exponent x - 1   (occupation series)
//   j2:     (1 - prod xi)^2, exponent x - 1   (position PMF series)
//   j:      (prod xi - 1),   exponent x       (distribution function series)
cplx integrand_jtilde(int x, std::span<const cplx> xi, const RateParams& params);
cplx integrand_j2(int x, std::span<const cplx> xi, const RateParams& params);
cplx integrand_j(int x, std::span<const cplx> xi, const RateParams& params);

enum class StepStyle { occupation, pmf, cdf };

struct StepTerm {
    cplx integral; // k-fold quadrature of the bare integrand (with e^{eps t})
    cplx term;     // assembled k-th series term including prefactor and sign
    double abs_sum;
};

// k-th term of the chosen series on the given nodes. The assembled term is
// sign * q^{k^2}/k! * prod_{j<k}(1-tau^j) * integral with sign (-1)^{k+1} for
// the occupation series and (-1)^k for the PMF/CDF series.
StepTerm step_term(StepStyle style, int k, int x, double t, const RateParams& params,
                   const QuadNodes& qn);

// k-th term of the TASEP distribution series: (-1)^k/k! times the quadrature
// of prod_{i != j}(xi_j - xi_i) * (prod xi - 1) * prod xi^x e^{(xi-1)t}/(xi(1-xi))^k
StepTerm tasep_term(int k, int x, double t, const QuadNodes& qn);

// P(X(t) = x), step initial condition. Evaluated at -|x| (the law is
// symmetric under x -> -x) where the contour powers are well conditioned.
SeriesEval pmf_step(int x, double t, const RateParams& params, const SeriesSpec& series);

// P(X(t) <= x); arguments >= 0 are folded through the exact reflection
// P(X <= x) = 1 - P(X <= -x-1)
SeriesEval cdf_step(int x, double t, const RateParams& params, const SeriesSpec& series);

// P(site x occupied at t) for the pure step system (no second-class particle)
SeriesEval occupation_step(int x, double t, const RateParams& params, const SeriesSpec& series);

// TASEP (tau = 0) distribution function, same reflection treatment
SeriesEval cdf_tasep(int x, double t, const SeriesSpec& series);

} // namespace asep
