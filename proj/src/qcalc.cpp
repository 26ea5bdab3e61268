#include "asep/qcalc.hpp"

#include <cmath>
#include <stdexcept>

namespace asep {

double q_bracket(int n, double tau) {
    if (n < 0)
        throw std::domain_error("q_bracket: n must be >= 0");
    if (n == 0)
        return 0.0;
    if (tau == 0.0)
        return 1.0;
    return (1.0 - std::pow(tau, n)) / (1.0 - tau);
}

double q_factorial(int n, double tau) {
    if (n < 0)
        throw std::domain_error("q_factorial: n must be >= 0");
    double r = 1.0;
    for (int j = 1; j <= n; ++j)
        r *= q_bracket(j, tau);
    return r;
}

double q_binomial(int n, int k, double tau) {
    if (k < 0 || k > n)
        return 0.0;
    // iterative bracket ratio keeps intermediates near the result's scale
    if (k > n - k)
        k = n - k;
    double r = 1.0;
    for (int j = 1; j <= k; ++j)
        r *= q_bracket(n - k + j, tau) / q_bracket(j, tau);
    return r;
}

double q_pochhammer(int k, double tau) {
    if (k < 1)
        throw std::domain_error("q_pochhammer: k must be >= 1");
    double r = 1.0;
    for (int j = 1; j < k; ++j)
        r *= 1.0 - std::pow(tau, j);
    return r;
}

double collapsed_m_sum(int k, double tau) {
    if (k < 1)
        throw std::domain_error("collapsed_m_sum: k must be >= 1");
    if (tau <= 0.0)
        throw std::domain_error("collapsed_m_sum: tau must be > 0 (negative tau powers); "
                                "the tau=0 limit is handled by the TASEP series");
    double sign = (k % 2 == 0) ? -1.0 : 1.0;
    return sign * std::pow(tau, -0.5 * k * (k + 1)) * q_pochhammer(k, tau);
}

double collapsed_m_sum_lhs(int k, double tau) {
    if (k < 1)
        throw std::domain_error("collapsed_m_sum_lhs: k must be >= 1");
    if (tau <= 0.0)
        throw std::domain_error("collapsed_m_sum_lhs: tau must be > 0");
    // the alternating sum cancels heavily at tau near 1; accumulate in
    // extended precision so the check exercises the algebra, not roundoff
    long double tl = (long double)tau;
    long double acc = 0.0L;
    for (int m = 1; m <= k; ++m) {
        long double term = powl(tl, 0.5L * m * (m - 1)) * powl(tl, (long double)(-k) * m);
        // [k-1 over k-m] via long double bracket products
        int kk = k - m;
        if (kk < 0 || kk > k - 1)
            continue;
        int kc = (kk > (k - 1) - kk) ? (k - 1) - kk : kk;
        long double qb = 1.0L;
        for (int j = 1; j <= kc; ++j) {
            long double num = (1.0L - powl(tl, (k - 1) - kc + j)) / (1.0L - tl);
            long double den = (1.0L - powl(tl, j)) / (1.0L - tl);
            qb *= num / den;
        }
        if (m % 2 == 0)
            term = -term;
        acc += term * qb;
    }
    return (double)acc;
}

} // namespace asep
