#include "asep/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "asep/errors.hpp"

namespace asep {

namespace {

constexpr double kZ99 = 2.5758293035489004;

struct SplitMix64 {
    std::uint64_t s;
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// independent stream per path, invariant under thread layout
SplitMix64 path_rng(std::uint64_t seed, std::uint64_t path) {
    return SplitMix64{mix64(seed ^ 0x6a09e667f3bcc909ULL) ^ mix64(path * 0xff51afd7ed558ccdULL + 0x2545f4914f6cdd1dULL)};
}

double uniform01(SplitMix64& g) { return (double)(g.next() >> 11) * 0x1.0p-53; }

// strictly positive uniform so the exponential draw stays finite
double uniform_pos(SplitMix64& g) { return (double)((g.next() >> 11) + 1) * 0x1.0p-53; }

int pick_index(SplitMix64& g, int n) {
    return (int)(((__uint128_t)g.next() * (std::uint64_t)n) >> 64);
}

// cell codes: 0 empty, 1 first class, 2 second class
struct PathCounters {
    std::vector<std::uint64_t> x_hist;      // indexed by x - lo, two-class only
    std::vector<std::uint64_t> first_hist;  // per-site final first-class counts
    std::vector<std::uint64_t> any_hist;    // per-site final any-particle counts
    std::uint64_t touched = 0;

    explicit PathCounters(int width) : x_hist(width, 0), first_hist(width, 0), any_hist(width, 0) {}

    void merge(const PathCounters& o) {
        for (std::size_t i = 0; i < x_hist.size(); ++i) {
            x_hist[i] += o.x_hist[i];
            first_hist[i] += o.first_hist[i];
            any_hist[i] += o.any_hist[i];
        }
        touched += o.touched;
    }
};

struct RunSetup {
    double p = 0.0;
    double t = 0.0;
    int lo = 0;
    int hi = 0;
    bool two_class = false;
    bool check = false;
    std::vector<std::int8_t> init_cells;
};

void run_one_path(const RunSetup& su, SplitMix64 g, PathCounters& acc) {
    const int width = su.hi - su.lo + 1;
    std::vector<std::int8_t> cells = su.init_cells;

    std::vector<int> ppos;
    int second_slot = -1;
    for (int j = 0; j < width; ++j) {
        if (cells[j] == 2) second_slot = (int)ppos.size();
        if (cells[j] != 0) ppos.push_back(j);
    }
    const int n_all = (int)ppos.size();
    const std::int8_t edge_lo0 = su.init_cells.front();
    const std::int8_t edge_hi0 = su.init_cells.back();
    const int n_first0 = n_all - (su.two_class ? 1 : 0);

    bool touched = false;
    double tcur = 0.0;
    const double inv_rate = 1.0 / (double)n_all;

    while (true) {
        tcur -= std::log(uniform_pos(g)) * inv_rate;
        if (tcur > su.t) break;

        const int i = pick_index(g, n_all);
        const int dir = uniform01(g) < su.p ? +1 : -1;
        const int s = ppos[i];
        const int tgt = s + dir;
        if (tgt < 0 || tgt >= width) continue;

        const std::int8_t me = cells[s];
        const std::int8_t there = cells[tgt];
        if (me == 1) {
            if (there == 1) continue;
            if (there == 2) {
                // first class displaces the tagged particle back to its own site
                cells[tgt] = 1;
                cells[s] = 2;
                ppos[i] = tgt;
                ppos[second_slot] = s;
            } else {
                cells[tgt] = 1;
                cells[s] = 0;
                ppos[i] = tgt;
            }
        } else {
            if (there != 0) continue;
            cells[tgt] = 2;
            cells[s] = 0;
            ppos[i] = tgt;
        }

        if (!touched && (cells.front() != edge_lo0 || cells.back() != edge_hi0)) touched = true;

        if (su.check) {
            int nf = 0, ns = 0;
            for (int j = 0; j < width; ++j) {
                nf += cells[j] == 1;
                ns += cells[j] == 2;
            }
            if (nf != n_first0 || ns != (su.two_class ? 1 : 0))
                throw std::logic_error("particle count changed during a path");
            if (su.two_class && cells[ppos[second_slot]] != 2)
                throw std::logic_error("tagged particle bookkeeping out of sync");
        }
    }

    if (su.two_class) acc.x_hist[ppos[second_slot]] += 1;
    for (int j = 0; j < width; ++j) {
        acc.first_hist[j] += cells[j] == 1;
        acc.any_hist[j] += cells[j] != 0;
    }
    acc.touched += touched;
}

PathCounters run_paths(const RunSetup& su, std::uint64_t n_paths, std::uint64_t seed, int threads) {
    const int width = su.hi - su.lo + 1;
    int nt = threads > 0 ? threads : 1;
    if ((std::uint64_t)nt > n_paths) nt = n_paths > 0 ? (int)n_paths : 1;

    std::vector<PathCounters> partial(nt, PathCounters(width));
    auto worker = [&](int ti) {
        for (std::uint64_t path = ti; path < n_paths; path += nt)
            run_one_path(su, path_rng(seed, path), partial[ti]);
    };
    if (nt == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (int ti = 0; ti < nt; ++ti) pool.emplace_back(worker, ti);
        for (auto& th : pool) th.join();
    }

    PathCounters total(width);
    for (int ti = 0; ti < nt; ++ti) total.merge(partial[ti]);
    return total;
}

RunSetup make_setup(const RateParams& params, double t, int lo, int hi, bool two_class,
                    const std::vector<int>& first_sites, bool check) {
    if (lo >= hi) throw config_error("window must satisfy lo < hi");
    if (t < 0.0) throw config_error("time must be nonnegative");
    RunSetup su;
    su.p = params.p;
    su.t = t;
    su.lo = lo;
    su.hi = hi;
    su.two_class = two_class;
    su.check = check;
    su.init_cells.assign(hi - lo + 1, 0);

    std::vector<int> sites = first_sites;
    if (sites.empty() && two_class) {
        for (int x = 1; x <= hi; ++x) sites.push_back(x);
    }
    for (int x : sites) {
        if (x < lo || x > hi) throw config_error("initial site outside the window");
        if (two_class && x == 0) throw config_error("site 0 is reserved for the tagged particle");
        if (su.init_cells[x - lo] != 0) throw config_error("duplicate initial site");
        su.init_cells[x - lo] = 1;
    }
    if (two_class) {
        if (lo > 0 || hi < 0) throw config_error("window must contain the origin");
        su.init_cells[-lo] = 2;
    }
    if (sites.empty() && !two_class) throw config_error("no particles in the initial condition");
    return su;
}

double halfwidth(std::uint64_t count, std::uint64_t n) {
    if (n == 0) return 0.0;
    const double phat = (double)count / (double)n;
    return kZ99 * std::sqrt(phat * (1.0 - phat) / (double)n);
}

} // namespace

double McResult::ci_halfwidth(int x) const {
    auto it = counts.find(x);
    return halfwidth(it == counts.end() ? 0 : it->second, n_paths);
}

double McOccResult::ci_halfwidth(int x) const {
    auto it = counts.find(x);
    return halfwidth(it == counts.end() ? 0 : it->second, n_paths);
}

McResult mc_run(const McConfig& cfg) {
    if (cfg.n_paths == 0) throw config_error("need at least one path");
    RunSetup su = make_setup(cfg.params, cfg.t, cfg.lo, cfg.hi, true, cfg.first_sites, cfg.check_invariants);
    PathCounters total = run_paths(su, cfg.n_paths, cfg.seed, cfg.threads);

    McResult out;
    out.n_paths = cfg.n_paths;
    out.seed = cfg.seed;
    const double invn = 1.0 / (double)cfg.n_paths;
    for (int j = 0; j <= cfg.hi - cfg.lo; ++j) {
        const int x = cfg.lo + j;
        if (total.x_hist[j] != 0) {
            out.counts[x] = total.x_hist[j];
            out.pmf_hat[x] = (double)total.x_hist[j] * invn;
        }
        out.occ_first[x] = (double)total.first_hist[j] * invn;
        out.occ_any[x] = (double)total.any_hist[j] * invn;
    }
    out.boundary_touch_rate = (double)total.touched * invn;
    return out;
}

McOccResult mc_occupation(const RateParams& params, double t, const std::vector<int>& sites,
                          int lo, int hi, std::uint64_t n_paths, std::uint64_t seed, int threads) {
    if (n_paths == 0) throw config_error("need at least one path");
    RunSetup su = make_setup(params, t, lo, hi, false, sites, false);
    PathCounters total = run_paths(su, n_paths, seed, threads);

    McOccResult out;
    out.n_paths = n_paths;
    out.seed = seed;
    const double invn = 1.0 / (double)n_paths;
    for (int j = 0; j <= hi - lo; ++j) {
        const int x = lo + j;
        out.counts[x] = total.first_hist[j];
        out.occ[x] = (double)total.first_hist[j] * invn;
    }
    out.boundary_touch_rate = (double)total.touched * invn;
    return out;
}

} // namespace asep
