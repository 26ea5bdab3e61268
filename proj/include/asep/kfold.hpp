#pragma once

#include <functional>
#include <span>

#include "asep/contour.hpp"

namespace asep {

// How the k-fold sum over node tuples is reduced.
//   symmetric: integrand invariant under tuple permutation; sum runs over
//              non-decreasing index tuples with multinomial multiplicity.
//   general:   full M^k tuple sum, no symmetry assumed.
enum class Symmetry { general, symmetric };

struct KfoldResult {
    cplx value;
    double abs_sum; // sum of |term| over tuples; roundoff floor for the value
};

using Integrand = std::function<cplx(std::span<const cplx>)>;

// Discrete k-fold contour integral: sum of integrand(tuple) * prod(weights)
// over node tuples. Throws std::overflow_error if a term magnitude leaves the
// finite double range.
KfoldResult kfold_integral(const Integrand& f, int k, const QuadNodes& nodes,
                           Symmetry sym = Symmetry::symmetric);

} // namespace asep
