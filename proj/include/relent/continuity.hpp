#pragma once

// Numerical verification of the continuity bound on E, the inequality chain
// behind it, the closest-state convergence statement, and the per-pair
// entanglement density on small tensor powers.

#include "relent/solver.hpp"

#include <chrono>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

namespace relent {

struct InequalityResult {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // rhs - lhs
    bool holds = false;  // slack >= -1e-9
};

struct ContinuityReport {
    std::uint64_t seed = 0;
    BipartiteDims dims;
    double trace_dist = 0.0;  // T = tr|sigma1 - sigma2|
    double bound = 0.0;       // continuity_bound(T, N)
    CertifiedValue e1, e2;
    double delta_upper = 0.0;  // conservative outer estimate of |E1 - E2|
    bool holds = false;
    double margin = 0.0;  // bound - delta_upper
    std::vector<InequalityResult> chain;
    Confidence confidence = Confidence::certified;
    bool skipped = false;  // T > 1/3: outside the bound's domain
};

struct ConvergenceEntry {
    long n = 0;
    double dist_to_limit = 0.0;   // ||sigma_n - sigma||
    double minimizer_dist = 0.0;  // ||rho_hat(sigma_n) - sigma||
    double e_upper = 0.0;
};

struct ConvergenceTrace {
    std::string family;
    std::vector<ConvergenceEntry> entries;  // ordered by n increasing
    bool criterion_met = false;
};

struct DensityRecord {
    int n = 1;
    CertifiedValue per_pair;  // interval scaled by 1/n
    double reference = 0.0;   // n = 1 per-pair upper bound
};

struct PairSamplerConfig {
    int rank = 0;         // induced-measure ancilla rank; 0 means N
    double t_min = 1e-3;  // floor of the log-uniform interpolation parameter
};

struct BatchResult {
    std::vector<ContinuityReport> reports;
    std::vector<std::size_t> bound_failures;
    std::vector<std::size_t> chain_failures;
    double max_ratio = 0.0;  // max delta_upper / bound
    double min_chain_slack = std::numeric_limits<double>::infinity();
    double elapsed_seconds = 0.0;
    std::uint64_t seed = 0;
};

namespace detail {

inline double interval_delta_upper(const CertifiedValue& a, const CertifiedValue& b) {
    return std::max(std::abs(a.upper - b.lower), std::abs(b.upper - a.lower));
}

inline InequalityResult make_result(std::string name, double lhs, double rhs) {
    InequalityResult r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.holds = r.slack >= -1e-9;
    return r;
}

// The five inequalities used to derive the continuity bound, evaluated at
// x = 1 - T. E-values enter as certified intervals: the sandwich checks use
// the sound interval direction (a reported violation is genuine), while the
// shifted-continuity check uses the conservative outer |delta| like the
// top-level bound check.
inline std::vector<InequalityResult> chain_impl(const DensityMatrix& s1, const DensityMatrix& s2,
                                                const ConvexSetSpec& cs, const SolverOptions& opts,
                                                double T, const CertifiedValue& e1,
                                                const CertifiedValue& e2) {
    const int n = cs.dims.total();
    const double x = 1.0 - T;
    ConvexSetSpec shifted = cs;
    shifted.x = x;
    SolverOptions sopts = opts;
    sopts.seed = derive_seed(opts.seed, 0xc0de01ULL);
    const CertifiedValue ex1 = ree_shifted(s1, shifted, sopts);
    const CertifiedValue ex2 = ree_shifted(s2, shifted, sopts);

    std::vector<InequalityResult> out;

    // (a) E <= E_x <= E - ln x for both states.
    {
        double lhs = e1.lower, rhs = ex1.upper;
        double slack = rhs - lhs;
        const auto consider = [&](double l, double r) {
            if (r - l < slack) {
                lhs = l;
                rhs = r;
                slack = r - l;
            }
        };
        consider(e2.lower, ex2.upper);
        consider(ex1.lower, e1.upper - std::log(x));
        consider(ex2.lower, e2.upper - std::log(x));
        out.push_back(make_result("sandwich", lhs, rhs));
    }

    // (b) |ln x| <= 2(1-x) on [1/2, 1].
    out.push_back(make_result("log-linear-bound", std::abs(std::log(x)), 2.0 * (1.0 - x)));

    // (c) entropy continuity: |S1(s1) - S1(s2)| <= T ln N + eta(T).
    out.push_back(make_result(
        "entropy-continuity",
        std::abs(von_neumann_entropy(s1) - von_neumann_entropy(s2)), fannes_bound(T, n)));

    // (d) |tr(s1 L) - tr(s2 L)| <= T (ln N - ln(1-x)) for L = log(shift(rho, x)),
    // sampled over tau and random product states in D.
    {
        const double rhs = T * (std::log(static_cast<double>(n)) - std::log(1.0 - x));
        double lhs_worst = 0.0;
        for (int i = 0; i < 8; ++i) {
            const DensityMatrix rho =
                i == 0 ? maximally_mixed(cs.dims)
                       : random_product_pure(cs.dims,
                                             derive_seed(opts.seed, 0xd00dULL + static_cast<std::uint64_t>(i)));
            const Matrix l = matrix_log(shift(rho, x).matrix);
            const double lhs =
                std::abs(((s1.matrix - s2.matrix) * l).trace().real());
            lhs_worst = std::max(lhs_worst, lhs);
        }
        out.push_back(make_result("trace-functional", lhs_worst, rhs));
    }

    // (e) |E_x(s1) - E_x(s2)| <= 2(T ln N + eta(T)), via certified intervals.
    out.push_back(make_result("shifted-continuity", interval_delta_upper(ex1, ex2),
                              2.0 * fannes_bound(T, n)));
    return out;
}

}  // namespace detail

// Checks |E(s1) - E(s2)| <= 2(T ln N + eta(T)) + 4T through certified
// intervals, using the conservative outer estimate of |E1 - E2|; a failure can
// only come from a genuine violation or from solver gap, never from interval
// slack hiding one. Pairs with T > 1/3 are reported skipped.
inline ContinuityReport continuity_check(const DensityMatrix& s1, const DensityMatrix& s2,
                                         const ConvexSetSpec& cs, const SolverOptions& opts) {
    if (!(s1.dims == s2.dims) || !(s1.dims == cs.dims)) {
        throw DimensionMismatch("continuity_check: dims differ");
    }
    ContinuityReport rep;
    rep.seed = opts.seed;
    rep.dims = cs.dims;
    rep.trace_dist = trace_distance(s1, s2);
    if (rep.trace_dist > 1.0 / 3.0) {
        rep.skipped = true;
        rep.holds = true;
        return rep;
    }
    rep.bound = continuity_bound(rep.trace_dist, cs.dims.total());

    // identical options (including the seed) for both states: solver error
    // correlates across near-identical pairs, which tightens delta_upper
    SolverOptions o = opts;
    o.seed = derive_seed(opts.seed, 0xe1ULL);
    rep.e1 = ree(s1, cs, o);
    rep.e2 = ree(s2, cs, o);
    rep.delta_upper = detail::interval_delta_upper(rep.e1, rep.e2);
    rep.holds = rep.delta_upper <= rep.bound + 1e-9;
    rep.margin = rep.bound - rep.delta_upper;
    rep.confidence = (rep.e1.confidence == Confidence::certified &&
                      rep.e2.confidence == Confidence::certified)
                         ? Confidence::certified
                         : Confidence::heuristic_lower;
    if (rep.trace_dist > 0.0) {
        rep.chain = detail::chain_impl(s1, s2, cs, opts, rep.trace_dist, rep.e1, rep.e2);
    }
    return rep;
}

// Standalone evaluation of the five-step inequality chain.
inline std::vector<InequalityResult> chain_check(const DensityMatrix& s1, const DensityMatrix& s2,
                                                 const ConvexSetSpec& cs,
                                                 const SolverOptions& opts) {
    if (!(s1.dims == s2.dims) || !(s1.dims == cs.dims)) {
        throw DimensionMismatch("chain_check: dims differ");
    }
    const double T = trace_distance(s1, s2);
    if (T <= 0.0 || T > 1.0 / 3.0) {
        throw OutOfDomain("chain_check: requires 0 < T <= 1/3");
    }
    SolverOptions o = opts;
    o.seed = derive_seed(opts.seed, 0xe1ULL);
    const CertifiedValue e1 = ree(s1, cs, o);
    const CertifiedValue e2 = ree(s2, cs, o);
    return detail::chain_impl(s1, s2, cs, opts, T, e1, e2);
}

// Follows sigma_n = (1 - 1/n) sigma + (1/n) zeta into sigma (a member of D)
// and records how the solver's closest state tracks sigma. Membership of
// sigma is gated by the partial-transpose test, which is exact for the
// separable set when N <= 6 and a necessary condition otherwise.
inline ConvergenceTrace convergence_trace(const DensityMatrix& sigma, const DensityMatrix& zeta,
                                      std::vector<long> schedule, const ConvexSetSpec& cs,
                                      const SolverOptions& opts, double dist_tol = 0.05) {
    if (!(sigma.dims == zeta.dims) || !(sigma.dims == cs.dims)) {
        throw DimensionMismatch("convergence_trace: dims differ");
    }
    if (!ppt_member(sigma)) {
        throw NotInSet("convergence_trace: base state fails set membership");
    }
    std::sort(schedule.begin(), schedule.end());
    ConvergenceTrace trace;
    trace.family = "(1-1/n) sigma + (1/n) zeta";
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const long n = schedule[i];
        if (n < 1) throw OutOfDomain("convergence_trace: schedule entries must be >= 1");
        const double w = 1.0 / static_cast<double>(n);
        const DensityMatrix sn =
            validate_density((1.0 - w) * sigma.matrix + w * zeta.matrix, sigma.dims);
        SolverOptions o = opts;
        o.seed = derive_seed(opts.seed, 0xc0ULL + i);
        const CertifiedValue e = ree(sn, cs, o);
        ConvergenceEntry entry;
        entry.n = n;
        entry.dist_to_limit = trace_distance(sn, sigma);
        entry.minimizer_dist = trace_distance(e.minimizer, sigma);
        entry.e_upper = e.upper;
        trace.entries.push_back(entry);
    }
    if (!trace.entries.empty()) {
        const ConvergenceEntry& last = trace.entries.back();
        trace.criterion_met =
            last.minimizer_dist <= std::max(5.0 * last.dist_to_limit, dist_tol);
    }
    return trace;
}

// Per-pair certified intervals (1/n) E(sigma^(x n)) across the A^n : B^n cut.
// The gap tolerance is applied per pair, i.e. scaled by n at level n.
inline std::vector<DensityRecord> density_check(const DensityMatrix& sigma, int n_max,
                                                const ConvexSetSpec& cs,
                                                const SolverOptions& opts) {
    if (n_max < 1) throw OutOfDomain("density_check: n_max must be >= 1");
    double dim = 1.0;
    for (int i = 0; i < n_max; ++i) dim *= sigma.dims.total();
    if (dim > 64.0) throw DimensionMismatch("density_check: tensor power exceeds solver limits");

    std::vector<DensityRecord> records;
    for (int n = 1; n <= n_max; ++n) {
        const DensityMatrix sn = tensor_power_cut(sigma, n);
        ConvexSetSpec cs_n = cs;
        cs_n.dims = sn.dims;
        SolverOptions o = opts;
        o.seed = derive_seed(opts.seed, 0xdeULL + static_cast<std::uint64_t>(n));
        o.gap_tol = opts.gap_tol * n;
        CertifiedValue e = ree(sn, cs_n, o);
        const double inv = 1.0 / static_cast<double>(n);
        e.lower *= inv;
        e.upper *= inv;
        e.fw_gap *= inv;
        DensityRecord rec;
        rec.n = n;
        rec.per_pair = std::move(e);
        rec.reference = records.empty() ? rec.per_pair.upper : records.front().per_pair.upper;
        records.push_back(std::move(rec));
    }
    return records;
}

namespace detail {

// Draws a pair with T <= 1/3 by construction: sigma2 interpolates from sigma1
// toward an independent random state, with the interpolation parameter
// log-uniform so both tiny and boundary T occur.
inline std::pair<DensityMatrix, DensityMatrix> sample_pair(const BipartiteDims& dims,
                                                           const PairSamplerConfig& sampler,
                                                           std::uint64_t seed) {
    const int rank = sampler.rank > 0 ? sampler.rank : dims.total();
    const DensityMatrix s1 = random_mixed(dims, rank, derive_seed(seed, 1));

    DensityMatrix zeta;
    double dist = 0.0;
    bool found = false;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        zeta = random_mixed(dims, rank,
                            derive_seed(seed, 2 + 7919ULL * static_cast<std::uint64_t>(attempt)));
        dist = trace_distance(s1, zeta);
        if (dist > 1e-12) {
            found = true;
            break;
        }
    }
    if (!found) throw SamplingExhausted("sample_pair: direction draws degenerate");

    const double t_max = std::min(2.0, (2.0 / 3.0) / dist);
    const double t_min = std::min(sampler.t_min, 0.5 * t_max);
    std::mt19937_64 rng(derive_seed(seed, 3));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double t = t_min * std::exp(uni(rng) * std::log(t_max / t_min));

    DensityMatrix s2;
    for (int guard = 0; guard < 4; ++guard) {
        s2 = validate_density((1.0 - 0.5 * t) * s1.matrix + 0.5 * t * zeta.matrix, dims);
        const double T = trace_distance(s1, s2);
        if (T <= 1.0 / 3.0) break;
        t *= (1.0 / 3.0) / T * (1.0 - 1e-12);
    }
    return {s1, s2};
}

}  // namespace detail

// Samples `count` pairs, runs the bound and chain checks on each, and
// aggregates. Items are independent; `threads` > 1 fans them out with
// per-item seeds, so parallel and serial runs produce identical reports.
inline BatchResult batch_report(int count, const BipartiteDims& dims,
                                const PairSamplerConfig& sampler, const ConvexSetSpec& cs,
                                const SolverOptions& opts, std::uint64_t seed, int threads = 1) {
    if (count < 1) throw OutOfDomain("batch_report: count must be >= 1");
    const auto t0 = std::chrono::steady_clock::now();

    BatchResult result;
    result.seed = seed;
    result.reports.resize(static_cast<std::size_t>(count));

    const auto run_item = [&](int i) {
        const std::uint64_t item_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
        auto [s1, s2] = detail::sample_pair(dims, sampler, item_seed);
        const double T = trace_distance(s1, s2);
        SolverOptions o = opts;
        o.seed = item_seed;
        // Solver tolerance scaled to the bound so interval widths stay small
        // against it even for near-identical pairs.
        o.gap_tol =
            std::clamp(continuity_bound(std::min(T, 1.0 / 3.0), dims.total()) / 24.0, 1e-7,
                       opts.gap_tol);
        result.reports[static_cast<std::size_t>(i)] = continuity_check(s1, s2, cs, o);
    };

    if (threads <= 1) {
        for (int i = 0; i < count; ++i) run_item(i);
    } else {
        const int workers = std::min(threads, count);
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                for (int i = w; i < count; i += workers) run_item(i);
            });
        }
        for (auto& th : pool) th.join();
    }

    for (std::size_t i = 0; i < result.reports.size(); ++i) {
        const ContinuityReport& rep = result.reports[i];
        if (rep.skipped) continue;
        if (!rep.holds) result.bound_failures.push_back(i);
        if (rep.bound > 0.0) {
            result.max_ratio = std::max(result.max_ratio, rep.delta_upper / rep.bound);
        }
        for (const InequalityResult& ir : rep.chain) {
            result.min_chain_slack = std::min(result.min_chain_slack, ir.slack);
            if (!ir.holds) {
                result.chain_failures.push_back(i);
                break;
            }
        }
    }
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace relent
