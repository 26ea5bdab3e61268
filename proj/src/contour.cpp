#include "asep/contour.hpp"

#include <cmath>
#include <numbers>

namespace asep {

void ContourSpec::validate(const RateParams& params) const {
    if (!(R > 1.0))
        throw config_error("contour: need R > 1, got R=" + std::to_string(R));
    double margin = params.q * R * R - R - params.p;
    if (!(margin > 0.0))
        throw config_error("contour: need q*R^2 - R - p > 0, got " + std::to_string(margin) +
                           " at R=" + std::to_string(R) + ", p=" + std::to_string(params.p));
    if (M < 8)
        throw config_error("contour: need M >= 8, got M=" + std::to_string(M));
    if (M % 2 != 0)
        throw config_error("contour: need M even, got M=" + std::to_string(M));
}

QuadNodes make_nodes(const ContourSpec& spec, const RateParams& params) {
    spec.validate(params);
    QuadNodes qn;
    qn.R = spec.R;
    qn.M = spec.M;
    qn.nodes.resize(spec.M);
    qn.weights.resize(spec.M);
    for (int j = 0; j < spec.M; ++j) {
        double th = 2.0 * std::numbers::pi * j / spec.M;
        cplx xi = spec.R * cplx(std::cos(th), std::sin(th));
        qn.nodes[j] = xi;
        qn.weights[j] = xi / double(spec.M);
    }
    return qn;
}

double min_radius(const RateParams& params) {
    return (1.0 + std::sqrt(1.0 + 4.0 * params.p * params.q)) / (2.0 * params.q);
}

double default_radius(const RateParams& params) {
    return std::max(2.0, 1.2 * min_radius(params));
}

double wide_radius(const RateParams& params) {
    return std::max(3.0, 1.2 * min_radius(params));
}

cplx epsilon(cplx xi, const RateParams& params) {
    if (xi == cplx(0.0, 0.0))
        throw std::domain_error("epsilon: xi = 0");
    return params.p / xi + params.q * xi - 1.0;
}

cplx pair_factor(cplx xi_i, cplx xi_j, const RateParams& params) {
    cplx den = params.p + params.q * xi_i * xi_j - xi_i;
    if (std::abs(den) < 1e-13)
        throw singular_error("pair_factor: node pair within 1e-13 of the pole "
                             "p + q*xi*xi' - xi = 0; change R or M");
    return (xi_j - xi_i) / den;
}

} // namespace asep
