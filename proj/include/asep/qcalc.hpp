#pragma once

#include "asep/rates.hpp"

namespace asep {

// tau-deformed bracket [n] = (1 - tau^n)/(1 - tau); [0] = 0, and at tau = 0
// every [n] with n >= 1 collapses to 1.
double q_bracket(int n, double tau);

// [n]! = [n][n-1]...[1], empty product 1
double q_factorial(int n, double tau);

// Gaussian binomial [n over k]; 0 whenever k < 0 or k > n (total over integers)
double q_binomial(int n, int k, double tau);

// prod_{j=1}^{k-1} (1 - tau^j); empty product 1 at k = 1
double q_pochhammer(int k, double tau);

// closed form of sum_{m=1}^{k} (-1)^{m+1} tau^{m(m-1)/2} tau^{-km} [k-1 over k-m]:
// (-1)^{k+1} tau^{-k(k+1)/2} prod_{j<k}(1 - tau^j). Needs tau > 0 (negative powers).
double collapsed_m_sum(int k, double tau);

// the explicit m-sum, kept as an independent check of the closed form
double collapsed_m_sum_lhs(int k, double tau);

} // namespace asep
