#pragma once

#include "asep/errors.hpp"

namespace asep {

// Jump rates of the asymmetric exclusion process. Particles hop right at
// rate p and left at rate q = 1 - p, with q > p, so the drift of the bulk
// is to the left and tau = p/q lies in [0, 1). tau == 0 is the totally
// asymmetric limit.
struct RateParams {
    double p;
    double q;
    double tau;

    static RateParams from_p(double p) {
        if (!(p >= 0.0) || !(p < 0.5))
            throw config_error("rate p must satisfy 0 <= p < 1/2, got p=" + std::to_string(p));
        RateParams r;
        r.p = p;
        r.q = 1.0 - p;
        r.tau = p / r.q;
        return r;
    }
};

} // namespace asep
