#pragma once

#include <vector>

#include "asep/rates.hpp"
#include "asep/util.hpp"

namespace asep {

// Circle C_R discretized by M equispaced nodes. The invariants keep every
// integrand pole strictly inside the circle, so R can be deformed without
// crossing a singularity.
struct ContourSpec {
    double R = 2.0;
    int M = 48;

    // throws config_error naming the violated inequality
    void validate(const RateParams& params) const;
};

struct QuadNodes {
    double R;
    int M;
    std::vector<cplx> nodes;   // xi_j = R exp(2 pi i j / M)
    std::vector<cplx> weights; // w_j = xi_j / M, absorbing the 1/(2 pi i)
};

QuadNodes make_nodes(const ContourSpec& spec, const RateParams& params);

// smallest admissible radius: qR^2 - R - p = 0 has root (1+sqrt(1+4pq))/(2q);
// the default contour stays a factor above it so the pairwise pole keeps a
// safe distance from the nodes even at p near 1/2
double min_radius(const RateParams& params);
double default_radius(const RateParams& params);

// wider contour for integrands carrying positive powers of xi (finite
// configurations evaluated to the right of their sites): the pairwise pole
// ring sits at radius up to (R+p)/(qR), and trapezoid aliasing decays like
// ((R+p)/(qR^2))^M, so the extra radius buys spectral headroom
double wide_radius(const RateParams& params);

// epsilon(xi) = p/xi + q xi - 1, the single-step symbol of the process
cplx epsilon(cplx xi, const RateParams& params);

// (xi_j - xi_i)/(p + q xi_i xi_j - xi_i); throws singular_error when the
// denominator is within 1e-13 of zero (node collided with the pairwise pole)
cplx pair_factor(cplx xi_i, cplx xi_j, const RateParams& params);

} // namespace asep
