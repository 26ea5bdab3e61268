#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "asep/contour.hpp"
#include "asep/rates.hpp"
#include "asep/step_series.hpp"

namespace asep {

// Nystrom discretization of the integral operator with kernel
// K_{x,t}(xi, xi') = q (xi')^x e^{eps(xi') t} / (p + q xi xi' - xi)
struct KernelMatrix {
    Eigen::MatrixXcd A; // A(i,j) = K(xi_i, xi_j) w_j
    int x = 0;
    double t = 0.0;
};

struct DetCoefficients {
    std::vector<cplx> c; // det(I - lambda A) = sum_k c[k] lambda^k
    bool eigen_path = false;
};

cplx kernel_eval(cplx xi, cplx xi_prime, int x, double t, const RateParams& params);

KernelMatrix build_matrix(int x, double t, const RateParams& params, const QuadNodes& qn);

// Taylor coefficients of det(I - lambda A) up to k_max. Newton's identities
// on traces of powers for k_max <= 8; elementary symmetric functions of the
// eigenvalues beyond that (trace powers lose accuracy for deep coefficients).
DetCoefficients det_coefficients(const KernelMatrix& km, int k_max);
DetCoefficients det_coefficients_newton(const KernelMatrix& km, int k_max);
DetCoefficients det_coefficients_eigen(const KernelMatrix& km, int k_max);

// k-th term of the distribution-function series at site x:
// (-1)^k tau^{-k(k-1)/2} prod_{j<k}(1-tau^j) (c_k(x+1) - c_k(x))
cplx fredholm_cdf_term(int k, const DetCoefficients& at_xp1, const DetCoefficients& at_x,
                       const RateParams& params);

// P(X(t) <= x) through the determinant coefficients, with the same x -> -x-1
// reflection as cdf_step. Terms are accepted only while two node resolutions
// agree on them; the resolution pair escalates until the truncation tail is
// resolved or the node cap is hit.
SeriesEval cdf_via_fredholm(int x, double t, const RateParams& params, const SeriesSpec& series);

// relative residual of the product identity for det(1/(p + q xi_i xi_j - xi_i))
double tw2_identity_residual(std::span<const cplx> xi, const RateParams& params);

// relative gap |sum - det| / max(|sum|, |det|) between the k-th term of the
// site-x distribution series computed two ways on the same nodes: the k-fold
// quadrature sum and the difference of determinant coefficients. Both sides
// are algebraic in the shared node values, weights, and exp(eps t) factors,
// so they are evaluated in extended precision from those double inputs and
// the gap measures the identity itself, not double roundoff in either route.
double bridge_term_gap(int k, int x, double t, const RateParams& params, const QuadNodes& qn);

namespace detail {

// Determinant-coefficient cache for an x-sweep: consecutive sites share the
// c_k(x) and c_k(x+1) evaluations, and the gate reuses them across node
// resolutions.
struct FredholmSweep {
    RateParams params;
    double t = 0.0;
    double R = 2.0;
    int k_max = 8;
    std::map<std::pair<int, int>, std::vector<cplx>> coeffs; // (site, M) -> c
    std::map<int, QuadNodes> nodes_by_m;

    FredholmSweep(const RateParams& pr, double t_, double R_, int k_max_)
        : params(pr), t(t_), R(R_), k_max(k_max_) {}
    const std::vector<cplx>& coeff(int site, int M);
};

// gated direct evaluation of D(y) = P(X <= y) at a reflected argument y <= -1
SeriesEval gated_cdf_direct(int y, FredholmSweep& sweep, const SeriesSpec& series);

} // namespace detail

} // namespace asep
