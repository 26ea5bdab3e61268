#include "asep/fredholm.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "asep/qcalc.hpp"
#include "asep/util.hpp"

namespace asep {

cplx kernel_eval(cplx xi, cplx xi_prime, int x, double t, const RateParams& params) {
    if (xi_prime == cplx(0.0, 0.0) && (x < 0 || t > 0.0))
        throw std::domain_error("kernel_eval: xi' = 0");
    cplx den = params.p + params.q * xi * xi_prime - xi;
    if (std::abs(den) < 1e-13)
        throw singular_error("kernel_eval: node pair within 1e-13 of the kernel pole; "
                             "change R or M");
    return params.q * ipow(xi_prime, x) * std::exp(epsilon(xi_prime, params) * t) / den;
}

KernelMatrix build_matrix(int x, double t, const RateParams& params, const QuadNodes& qn) {
    KernelMatrix km;
    km.x = x;
    km.t = t;
    km.A.resize(qn.M, qn.M);
    // column factor xi'^x e^{eps t} w computed once per j
    for (int j = 0; j < qn.M; ++j) {
        cplx colf = params.q * ipow(qn.nodes[j], x) *
                    std::exp(epsilon(qn.nodes[j], params) * t) * qn.weights[j];
        for (int i = 0; i < qn.M; ++i) {
            cplx den = params.p + params.q * qn.nodes[i] * qn.nodes[j] - qn.nodes[i];
            if (std::abs(den) < 1e-13)
                throw singular_error("build_matrix: node pair hit the kernel pole");
            km.A(i, j) = colf / den;
        }
    }
    return km;
}

DetCoefficients det_coefficients_newton(const KernelMatrix& km, int k_max) {
    if (k_max > km.A.rows())
        throw std::domain_error("det_coefficients: k_max exceeds matrix dimension");
    std::vector<cplx> traces(k_max + 1);
    Eigen::MatrixXcd P = km.A;
    for (int r = 1; r <= k_max; ++r) {
        traces[r] = P.trace();
        if (r < k_max)
            P = P * km.A;
    }
    DetCoefficients dc;
    dc.c.assign(k_max + 1, cplx(0.0, 0.0));
    dc.c[0] = cplx(1.0, 0.0);
    for (int k = 1; k <= k_max; ++k) {
        cplx s(0.0, 0.0);
        for (int r = 1; r <= k; ++r)
            s += traces[r] * dc.c[k - r];
        dc.c[k] = -s / double(k);
    }
    return dc;
}

DetCoefficients det_coefficients_eigen(const KernelMatrix& km, int k_max) {
    if (k_max > km.A.rows())
        throw std::domain_error("det_coefficients: k_max exceeds matrix dimension");
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(km.A, false);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("det_coefficients: eigenvalue iteration failed");
    DetCoefficients dc;
    dc.eigen_path = true;
    dc.c.assign(k_max + 1, cplx(0.0, 0.0));
    dc.c[0] = cplx(1.0, 0.0);
    // accumulate prod_i (1 - lambda_i z) truncated at degree k_max
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        cplx lam = es.eigenvalues()(i);
        for (int k = k_max; k >= 1; --k)
            dc.c[k] -= lam * dc.c[k - 1];
    }
    return dc;
}

DetCoefficients det_coefficients(const KernelMatrix& km, int k_max) {
    if (k_max <= 8)
        return det_coefficients_newton(km, k_max);
    return det_coefficients_eigen(km, k_max);
}

cplx fredholm_cdf_term(int k, const DetCoefficients& at_xp1, const DetCoefficients& at_x,
                       const RateParams& params) {
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(params.tau, -0.5 * k * (k - 1)) * q_pochhammer(k, params.tau) *
           (at_xp1.c[k] - at_x.c[k]);
}

namespace detail {

const std::vector<cplx>& FredholmSweep::coeff(int site, int M) {
    auto key = std::make_pair(site, M);
    auto it = coeffs.find(key);
    if (it != coeffs.end())
        return it->second;
    auto nit = nodes_by_m.find(M);
    if (nit == nodes_by_m.end()) {
        ContourSpec cs{R, M};
        nit = nodes_by_m.emplace(M, make_nodes(cs, params)).first;
    }
    KernelMatrix km = build_matrix(site, t, params, nit->second);
    DetCoefficients dc = det_coefficients(km, k_max);
    return coeffs.emplace(key, std::move(dc.c)).first->second;
}

namespace {

cplx term_from(int k, const std::vector<cplx>& ca, const std::vector<cplx>& cb,
               const RateParams& params) {
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(params.tau, -0.5 * k * (k - 1)) * q_pochhammer(k, params.tau) *
           (ca[k] - cb[k]);
}

} // namespace

SeriesEval gated_cdf_direct(int y, FredholmSweep& sweep, const SeriesSpec& series) {
    const double tol = series.term_tol;
    const double floor = 1e-15;
    int M1 = std::max(64, series.contour.M);
    if (M1 % 2)
        ++M1;

    SeriesEval ev;
    while (true) {
        int M2 = 3 * M1 / 2;
        if (M2 % 2)
            ++M2;

        ev = SeriesEval{};
        ev.m_used = M2;
        KahanSum<double> acc;
        int consec_small = 0;
        bool noise_blocked = false;
        double last = 0.0;

        const std::vector<cplx>& a1 = sweep.coeff(y + 1, M1);
        const std::vector<cplx>& b1 = sweep.coeff(y, M1);
        const std::vector<cplx>& a2 = sweep.coeff(y + 1, M2);
        const std::vector<cplx>& b2 = sweep.coeff(y, M2);

        for (int k = 1; k <= sweep.k_max; ++k) {
            cplx t1 = term_from(k, a1, b1, sweep.params);
            cplx t2 = term_from(k, a2, b2, sweep.params);
            double noise = std::abs(t1 - t2);
            double mag = std::abs(t2);

            if (mag >= std::max(floor, 4.0 * noise)) {
                acc.add(t2.real());
                ev.term_mags.push_back(mag);
                ev.k_used = k;
                last = mag;
                consec_small = (mag < tol) ? consec_small + 1 : 0;
                if (consec_small >= 2) {
                    ev.converged = true;
                    break;
                }
            } else if (mag < tol && noise < tol) {
                // indistinguishable from zero at the requested tolerance
                ev.converged = true;
                last = std::max(mag, noise);
                break;
            } else {
                noise_blocked = true;
                last = mag;
                break;
            }
        }
        ev.value = acc.value();
        ev.tail_estimate = 2.0 * last;
        if (!noise_blocked) {
            if (!ev.converged)
                ev.converged = last < tol; // k_max cut the series after decay
            return ev;
        }
        if (M2 >= 512) {
            ev.converged = false;
            return ev; // noise-limited at the node cap; reported, not hidden
        }
        M1 = M2;
    }
}

} // namespace detail

SeriesEval cdf_via_fredholm(int x, double t, const RateParams& params, const SeriesSpec& series) {
    if (params.tau <= 0.0)
        throw std::domain_error("cdf_via_fredholm: tau must be > 0 (use cdf_tasep at tau = 0)");
    if (t < 0.0)
        throw std::domain_error("cdf_via_fredholm: t must be >= 0");
    double R = series.contour.R > 1.0 ? series.contour.R : default_radius(params);
    detail::FredholmSweep sweep(params, t, R, series.k_max);
    int y = (x <= -1) ? x : -x - 1;
    SeriesEval ev = detail::gated_cdf_direct(y, sweep, series);
    if (x >= 0)
        ev.value = 1.0 - ev.value;
    return ev;
}

namespace {

// the determinant equals +-(pq)^{k(k-1)/2} times O(1) factors, so at small p
// elimination has to dig the value out of ~20 orders of cancellation; the LU
// side runs in quad precision to keep the residual a statement about the
// algebra rather than about floating-point loss
using qcplx = std::complex<__float128>;

long double qnorm2(const qcplx& z) {
    return (long double)(z.real() * z.real() + z.imag() * z.imag());
}

qcplx quad_lu_det(std::vector<std::vector<qcplx>> a) {
    const int n = (int)a.size();
    qcplx det(1);
    for (int c = 0; c < n; ++c) {
        int piv = c;
        long double best = qnorm2(a[c][c]);
        for (int r = c + 1; r < n; ++r)
            if (qnorm2(a[r][c]) > best) {
                best = qnorm2(a[r][c]);
                piv = r;
            }
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (int r = c + 1; r < n; ++r) {
            qcplx f = a[r][c] / a[c][c];
            for (int j = c + 1; j < n; ++j) a[r][j] -= f * a[c][j];
        }
    }
    return det;
}

} // namespace

double tw2_identity_residual(std::span<const cplx> xi, const RateParams& params) {
    using lcplx = std::complex<long double>;
    const int k = (int)xi.size();
    const long double p = params.p, q = params.q;
    const qcplx qp((__float128)params.p), qq((__float128)params.q);

    std::vector<std::vector<qcplx>> B(k, std::vector<qcplx>(k));
    for (int i = 0; i < k; ++i) {
        const qcplx zi((__float128)xi[i].real(), (__float128)xi[i].imag());
        for (int j = 0; j < k; ++j) {
            const qcplx zj((__float128)xi[j].real(), (__float128)xi[j].imag());
            qcplx den = qp + qq * zi * zj - zi;
            if (qnorm2(den) < 1e-26L)
                throw singular_error("tw2_identity_residual: node pair hit the pole");
            B[i][j] = qcplx(1) / den;
        }
    }
    const qcplx det = quad_lu_det(std::move(B));
    const lcplx lhs((long double)det.real(), (long double)det.imag());

    std::vector<lcplx> z(xi.begin(), xi.end());
    lcplx rhs = (k % 2 == 0) ? lcplx(1.0L) : lcplx(-1.0L);
    rhs *= std::pow(p * q, 0.5L * k * (k - 1));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (i != j)
                rhs *= (z[j] - z[i]) / (p + q * z[i] * z[j] - z[i]);
    for (int i = 0; i < k; ++i)
        rhs /= (lcplx(1.0L) - z[i]) * (q * z[i] - p);

    return (double)(std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)));
}

namespace {

qcplx qipow(qcplx z, int e) {
    if (e < 0)
        return qcplx(1) / qipow(z, -e);
    qcplx r(1);
    while (e) {
        if (e & 1)
            r *= z;
        z *= z;
        e >>= 1;
    }
    return r;
}

long double qabs(const qcplx& z) {
    return std::sqrt(qnorm2(z));
}

} // namespace

// note the floor: the stored rates satisfy p + q = 1 only to the nearest
// double (1 - p rounds), and the two routes factor the shared denominator
// differently, so their exact values differ by about (p + q - 1) z per node.
// The gap therefore bottoms out near 1e-15 relative however precisely both
// sides are computed.
double bridge_term_gap(int k, int x, double t, const RateParams& params, const QuadNodes& qn) {
    if (k < 1)
        throw std::domain_error("bridge_term_gap: k must be >= 1");
    const int M = qn.M;
    if (k > M)
        throw std::domain_error("bridge_term_gap: k exceeds the node count");

    const __float128 p = params.p, q = params.q, tau = params.tau;

    // shared inputs, promoted exactly: nodes, weights, and the per-node
    // exp(eps t) factors as the double route computes them
    std::vector<qcplx> z(M), w(M), E(M);
    for (int j = 0; j < M; ++j) {
        z[j] = qcplx((__float128)qn.nodes[j].real(), (__float128)qn.nodes[j].imag());
        w[j] = qcplx((__float128)qn.weights[j].real(), (__float128)qn.weights[j].imag());
        cplx ef = std::exp(epsilon(qn.nodes[j], params) * t);
        E[j] = qcplx((__float128)ef.real(), (__float128)ef.imag());
    }

    __float128 poch = 1;
    {
        __float128 tp = 1;
        for (int j = 1; j <= k; ++j) {
            tp *= tau;
            poch *= (__float128)1 - tp;
        }
    }
    const __float128 sgn = (k % 2 == 0) ? 1 : -1;

    // series route: sum of the distribution-series integrand over strictly
    // increasing node tuples (diagonal tuples vanish), prefactor q^{k^2} poch
    std::vector<qcplx> pp((size_t)M * M), pv(M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            if (i == j) {
                pp[(size_t)i * M + j] = qcplx(0);
                continue;
            }
            qcplx di = p + q * z[i] * z[j] - z[i];
            qcplx dj = p + q * z[j] * z[i] - z[j];
            pp[(size_t)i * M + j] = (z[j] - z[i]) * (z[i] - z[j]) / (di * dj);
        }
    for (int j = 0; j < M; ++j)
        pv[j] = qipow(z[j], x) * E[j] / ((qcplx(1) - z[j]) * (q * z[j] - p)) * w[j];

    std::vector<int> idx(k);
    std::vector<qcplx> pairpro(k + 1), perpro(k + 1), prodz(k + 1);
    pairpro[0] = perpro[0] = prodz[0] = qcplx(1);
    auto fill_from = [&](int d) {
        for (int e = d; e < k; ++e) {
            int j = idx[e];
            qcplx pm(1);
            for (int a = 0; a < e; ++a)
                pm *= pp[(size_t)idx[a] * M + j];
            pairpro[e + 1] = pairpro[e] * pm;
            perpro[e + 1] = perpro[e] * pv[j];
            prodz[e + 1] = prodz[e] * z[j];
        }
    };
    for (int i = 0; i < k; ++i)
        idx[i] = i;
    fill_from(0);

    qcplx acc(0);
    while (true) {
        acc += pairpro[k] * (prodz[k] - qcplx(1)) * perpro[k];
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
    __float128 qk2 = 1;
    for (int j = 0; j < k * k; ++j)
        qk2 *= q;
    const qcplx term_sum = sgn * qk2 * poch * acc;

    // determinant route: Newton's identities on traces of the kernel matrix
    // at x and x + 1, prefactor tau^{-k(k-1)/2} poch
    auto coeff_k = [&](int site) {
        std::vector<qcplx> A((size_t)M * M);
        for (int j = 0; j < M; ++j) {
            qcplx colf = q * qipow(z[j], site) * E[j] * w[j];
            for (int i = 0; i < M; ++i)
                A[(size_t)i * M + j] = colf / (p + q * z[i] * z[j] - z[i]);
        }
        std::vector<qcplx> tr(k + 1), P = A;
        for (int r = 1; r <= k; ++r) {
            qcplx s(0);
            for (int i = 0; i < M; ++i)
                s += P[(size_t)i * M + i];
            tr[r] = s;
            if (r < k) {
                std::vector<qcplx> Q((size_t)M * M, qcplx(0));
                for (int i = 0; i < M; ++i)
                    for (int l = 0; l < M; ++l) {
                        qcplx a = P[(size_t)i * M + l];
                        for (int j2 = 0; j2 < M; ++j2)
                            Q[(size_t)i * M + j2] += a * A[(size_t)l * M + j2];
                    }
                P.swap(Q);
            }
        }
        std::vector<qcplx> c(k + 1);
        c[0] = qcplx(1);
        for (int kk = 1; kk <= k; ++kk) {
            qcplx s(0);
            for (int r = 1; r <= kk; ++r)
                s += tr[r] * c[kk - r];
            c[kk] = -s / (__float128)kk;
        }
        return c[k];
    };
    __float128 tneg = 1;
    for (int j = 0; j < k * (k - 1) / 2; ++j)
        tneg /= tau;
    const qcplx term_det = sgn * tneg * poch * (coeff_k(x + 1) - coeff_k(x));

    const long double den = std::max(qabs(term_sum), qabs(term_det));
    if (den < 1e-300L)
        return 0.0;
    return (double)(qabs(term_sum - term_det) / den);
}

} // namespace asep
