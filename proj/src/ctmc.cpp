#include "asep/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "asep/errors.hpp"

namespace asep {

namespace {

constexpr std::size_t kMaxStates = 5'000'000;
constexpr double kPoissonTail = 1e-13;
constexpr double kMaxChunk = 300.0; // cap on lambda*t per uniformization pass

std::uint64_t binom_count(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int j = 1; j <= k; ++j) r = r * (std::uint64_t)(n - k + j) / (std::uint64_t)j;
    return r;
}

std::uint64_t next_same_popcount(std::uint64_t v) {
    const std::uint64_t c = v & (~v + 1);
    const std::uint64_t r = v + c;
    return r | ((((v ^ r) >> 2) / c));
}

std::size_t find_state(const std::vector<std::uint64_t>& keys, std::uint64_t key) {
    auto it = std::lower_bound(keys.begin(), keys.end(), key);
    return (std::size_t)(it - keys.begin());
}

// cell codes match the sampler: 0 empty, 1 first class, 2 tag
int cell_at(std::uint64_t key, int width, bool two_class, int j) {
    if ((key >> j) & 1u) return 1;
    if (two_class && (int)(key >> width) == j) return 2;
    return 0;
}

CtmcSystem build_common(const RateParams& params, int lo, int hi, bool two_class,
                        std::vector<int> sites) {
    if (lo >= hi) throw config_error("window must satisfy lo < hi");
    const int width = hi - lo + 1;
    if (width > 40) throw config_error("window too wide to encode");

    CtmcSystem sys;
    sys.params = params;
    sys.lo = lo;
    sys.hi = hi;
    sys.two_class = two_class;
    sys.first_sites = sites;

    std::uint64_t init_mask = 0;
    for (int x : sites) {
        if (x < lo || x > hi) throw config_error("initial site outside the window");
        if (two_class && x == 0) throw config_error("site 0 is reserved for the tagged particle");
        const std::uint64_t bit = 1ull << (x - lo);
        if (init_mask & bit) throw config_error("duplicate initial site");
        init_mask |= bit;
    }
    const int b = (int)sites.size();
    if (!two_class && b == 0) throw config_error("no particles in the initial condition");
    if (two_class && (lo > 0 || hi < 0)) throw config_error("window must contain the origin");

    const std::uint64_t n_states = two_class ? (std::uint64_t)width * binom_count(width - 1, b)
                                             : binom_count(width, b);
    if (n_states > kMaxStates)
        throw config_error("state space has " + std::to_string(n_states) +
                           " states, above the supported limit");

    sys.keys.reserve(n_states);
    if (two_class) {
        for (int xi = 0; xi < width; ++xi) {
            const std::uint64_t prefix = (std::uint64_t)xi << width;
            if (b == 0) {
                sys.keys.push_back(prefix);
                continue;
            }
            std::uint64_t m = (1ull << b) - 1;
            const std::uint64_t end = 1ull << width;
            while (m < end) {
                if (!((m >> xi) & 1u)) sys.keys.push_back(prefix | m);
                m = next_same_popcount(m);
            }
        }
        std::sort(sys.keys.begin(), sys.keys.end());
    } else {
        std::uint64_t m = (1ull << b) - 1;
        const std::uint64_t end = 1ull << width;
        while (m < end) {
            sys.keys.push_back(m);
            m = next_same_popcount(m);
        }
    }

    const double p = params.p;
    const double q = params.q;
    sys.row_ptr.assign(sys.keys.size() + 1, 0);
    sys.exit.assign(sys.keys.size(), 0.0);

    std::vector<std::uint32_t> cols;
    std::vector<double> rates;
    cols.reserve(sys.keys.size() * 4);
    rates.reserve(sys.keys.size() * 4);

    for (std::size_t si = 0; si < sys.keys.size(); ++si) {
        const std::uint64_t key = sys.keys[si];
        const std::uint64_t mask = key & ((1ull << width) - 1);
        const int xi = two_class ? (int)(key >> width) : -1;

        auto emit = [&](std::uint64_t nkey, double r) {
            cols.push_back((std::uint32_t)find_state(sys.keys, nkey));
            rates.push_back(r);
            sys.exit[si] += r;
        };

        for (int j = 0; j < width; ++j) {
            if (!((mask >> j) & 1u)) continue;
            for (int dir : {+1, -1}) {
                const int tgt = j + dir;
                if (tgt < 0 || tgt >= width) continue;
                if ((mask >> tgt) & 1u) continue;
                const double r = dir > 0 ? p : q;
                const std::uint64_t nmask = mask ^ (1ull << j) ^ (1ull << tgt);
                if (two_class && tgt == xi)
                    emit(((std::uint64_t)j << width) | nmask, r); // swap with the tag
                else
                    emit((two_class ? (std::uint64_t)xi << width : 0ull) | nmask, r);
            }
        }
        if (two_class) {
            for (int dir : {+1, -1}) {
                const int tgt = xi + dir;
                if (tgt < 0 || tgt >= width) continue;
                if ((mask >> tgt) & 1u) continue; // firsts block the tag
                emit(((std::uint64_t)tgt << width) | mask, dir > 0 ? p : q);
            }
        }
        sys.row_ptr[si + 1] = cols.size();
    }
    sys.col = std::move(cols);
    sys.rate = std::move(rates);
    sys.lambda = *std::max_element(sys.exit.begin(), sys.exit.end());

    const std::uint64_t init_key =
        two_class ? (((std::uint64_t)(-lo) << width) | init_mask) : init_mask;
    sys.init_index = find_state(sys.keys, init_key);
    return sys;
}

} // namespace

CtmcSystem ctmc_build(const RateParams& params, int lo, int hi) {
    std::vector<int> sites;
    for (int x = 1; x <= hi; ++x) sites.push_back(x);
    return build_common(params, lo, hi, true, std::move(sites));
}

CtmcSystem ctmc_build_sites(const RateParams& params, int lo, int hi,
                            const std::vector<int>& first_sites) {
    return build_common(params, lo, hi, true, first_sites);
}

CtmcSystem ctmc_build_single(const RateParams& params, int lo, int hi,
                             const std::vector<int>& sites) {
    return build_common(params, lo, hi, false, sites);
}

std::vector<double> ctmc_distribution(const CtmcSystem& sys, double t) {
    if (t < 0.0) throw config_error("time must be nonnegative");
    const std::size_t n = sys.size();
    std::vector<double> pi(n, 0.0);
    pi[sys.init_index] = 1.0;
    if (t == 0.0 || sys.lambda == 0.0) return pi;

    const int chunks = (int)std::ceil(sys.lambda * t / kMaxChunk);
    const double dt = t / chunks;
    const double lt = sys.lambda * dt;
    const double inv_lambda = 1.0 / sys.lambda;

    std::vector<double> cur(n), nxt(n), acc(n);
    for (int c = 0; c < chunks; ++c) {
        cur = pi;
        double w = std::exp(-lt);
        double cum = w;
        for (std::size_t i = 0; i < n; ++i) acc[i] = w * cur[i];
        for (int k = 1; cum < 1.0 - kPoissonTail; ++k) {
            // one transition step of P = I + Q / lambda
            for (std::size_t i = 0; i < n; ++i) nxt[i] = cur[i] * (1.0 - sys.exit[i] * inv_lambda);
            for (std::size_t i = 0; i < n; ++i) {
                const double m = cur[i] * inv_lambda;
                if (m == 0.0) continue;
                for (std::size_t e = sys.row_ptr[i]; e < sys.row_ptr[i + 1]; ++e)
                    nxt[sys.col[e]] += m * sys.rate[e];
            }
            cur.swap(nxt);
            w *= lt / k;
            cum += w;
            for (std::size_t i = 0; i < n; ++i) acc[i] += w * cur[i];
            if (k > 1000000) throw std::runtime_error("uniformization failed to converge");
        }
        pi = acc;
    }
    return pi;
}

CtmcPmf ctmc_pmf(const CtmcSystem& sys, double t) {
    if (!sys.two_class) throw config_error("tag position law needs a two-class system");
    const std::vector<double> pi = ctmc_distribution(sys, t);
    const int width = sys.width();

    CtmcPmf out;
    for (int x = sys.lo; x <= sys.hi; ++x) out.pmf[x] = 0.0;
    const std::uint64_t init_key = sys.keys[sys.init_index];
    const int lo0 = cell_at(init_key, width, true, 0);
    const int hi0 = cell_at(init_key, width, true, width - 1);
    for (std::size_t si = 0; si < sys.size(); ++si) {
        const std::uint64_t key = sys.keys[si];
        out.pmf[sys.lo + (int)(key >> width)] += pi[si];
        if (cell_at(key, width, true, 0) != lo0 || cell_at(key, width, true, width - 1) != hi0)
            out.boundary_mass += pi[si];
    }
    return out;
}

CtmcOcc ctmc_occupation(const CtmcSystem& sys, double t) {
    const std::vector<double> pi = ctmc_distribution(sys, t);
    const int width = sys.width();

    CtmcOcc out;
    for (int x = sys.lo; x <= sys.hi; ++x) {
        out.occ_first[x] = 0.0;
        out.occ_any[x] = 0.0;
    }
    const std::uint64_t init_key = sys.keys[sys.init_index];
    const int lo0 = cell_at(init_key, width, sys.two_class, 0);
    const int hi0 = cell_at(init_key, width, sys.two_class, width - 1);
    for (std::size_t si = 0; si < sys.size(); ++si) {
        const std::uint64_t key = sys.keys[si];
        for (int j = 0; j < width; ++j) {
            const int c = cell_at(key, width, sys.two_class, j);
            if (c == 1) out.occ_first[sys.lo + j] += pi[si];
            if (c != 0) out.occ_any[sys.lo + j] += pi[si];
        }
        if (cell_at(key, width, sys.two_class, 0) != lo0 ||
            cell_at(key, width, sys.two_class, width - 1) != hi0)
            out.boundary_mass += pi[si];
    }
    return out;
}

} // namespace asep
