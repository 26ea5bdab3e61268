#pragma once

#include <vector>

#include "asep/contour.hpp"
#include "asep/rates.hpp"

namespace asep {

// Finite set of initial first-class sites Y = {y1 < y2 < ...}, all >= 1.
// The second-class particle always starts at 0, so the augmented set
// Y' = {0} u Y drives the coupled occupation formula.
struct InitialConfig {
    std::vector<int> sites;

    void validate() const; // throws config_error
    std::vector<int> with_zero() const;
};

// number of pairs (s, y) with s in S, y in Y, y <= s
int sigma(const std::vector<int>& S, const std::vector<int>& Y);

// series coefficient c_{m,k} = q^{k(k-1)/2} (-1)^{m+1} tau^{m(m-1)/2} tau^{-km}
// [k-1 over k-m]; identically 0 for m > k
double c_mk(int m, int k, const RateParams& params);

struct FiniteEval {
    double value;
    double imag_resid;             // |Im| of the assembled sum (must be ~0)
    std::vector<double> term_mags; // |term| per series order k
};

// P_Y(x_m(t) = x): position law of the m-th leftmost first-class particle
FiniteEval position_pmf_finite(const InitialConfig& Y, int m, int x, double t,
                               const RateParams& params, const ContourSpec& spec);

// P(eta_t(x) = 1) for the process started from an arbitrary finite site list
// (strictly increasing, may include 0); worker shared by the two ops below
FiniteEval occupation_prob_sites(const std::vector<int>& sites, int x, double t,
                                 const RateParams& params, const ContourSpec& spec);

FiniteEval occupation_prob_finite(const InitialConfig& Y, int x, double t,
                                  const RateParams& params, const ContourSpec& spec);

// P_Y(X(t) = x) = P_{Y'}(zeta_t(x)=1) - P_Y(eta_t(x)=1)
FiniteEval second_class_pmf_finite(const InitialConfig& Y, int x, double t,
                                   const RateParams& params, const ContourSpec& spec);

// (-1)^{N+1} prod_{j=1}^{N-1} (q^j - p^j)
double leading_coefficient(int N, const RateParams& params);

// the same prefactor assembled the way the k = N = |Y| term of the occupation
// series builds it (q power, collapsed m-sum, tau^{sigma(Y,Y)}); equals
// leading_coefficient when the algebra is right
double assembled_leading_prefactor(int N, const RateParams& params);

} // namespace asep
