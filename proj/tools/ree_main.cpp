// Command-line front end: compute certified E values for state files and run
// the continuity / convergence / entropy-bound / chain verifications, with
// JSON/CSV reports.
//
// Exit codes: 0 success, 2 input error, 3 solver nonconvergence,
//             4 inequality violation, 5 set-membership violation.

#include "relent/ree.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>

namespace {

using namespace relent;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNoConverge = 3;
constexpr int kExitViolation = 4;
constexpr int kExitMembership = 5;

struct CommonFlags {
    std::string set_kind = "sep";
    double x = 1.0 - 1e-6;
    double gap_tol = 0.0;  // 0 = per-command default
    int max_iters = 50000;
    int restarts = 32;
    std::uint64_t seed = 0;
    bool deterministic = false;
};

void add_solver_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--set", f.set_kind, "convex set: sep or ppt")
        ->check(CLI::IsMember({"sep", "ppt"}));
    cmd->add_option("--x", f.x, "tau-regularization weight in [0.5, 1)");
    cmd->add_option("--gap-tol", f.gap_tol,
                    "certified interval gap tolerance in nats (0 = command default)");
    cmd->add_option("--max-iters", f.max_iters, "solver iteration cap");
    cmd->add_option("--restarts", f.restarts, "separable-oracle restarts");
    cmd->add_option("--seed", f.seed, "root seed; all randomness derives from it");
    cmd->add_flag("--deterministic", f.deterministic, "suppress the timestamp field");
}

SolverOptions make_options(const CommonFlags& f, double default_gap_tol) {
    SolverOptions o;
    o.x = f.x;
    o.gap_tol = f.gap_tol > 0.0 ? f.gap_tol : default_gap_tol;
    o.max_iters = f.max_iters;
    o.restarts = f.restarts;
    o.seed = f.seed;
    return o;
}

SetKind parse_set(const std::string& s) { return s == "ppt" ? SetKind::ppt : SetKind::sep; }

BipartiteDims parse_dims(const std::string& text) {
    const auto sep = text.find('x');
    if (sep == std::string::npos) throw OutOfDomain("dims must look like 2x2");
    BipartiteDims dims;
    try {
        dims.dim_a = std::stoi(text.substr(0, sep));
        dims.dim_b = std::stoi(text.substr(sep + 1));
    } catch (const std::exception&) {
        throw OutOfDomain("dims must look like 2x2");
    }
    require_valid(dims);
    return dims;
}

int thread_count() {
    const int hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("REE_THREADS")) {
        const int cap = std::atoi(env);
        if (cap <= 0) return 1;  // 0 = serial
        return std::min(cap, hw);
    }
    return hw;
}

void attach_timestamp(nlohmann::json& j, bool deterministic) {
    if (deterministic) return;
    j["timestamp"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw Error("cannot write " + out_path);
    out << text;
}

// ---------------------------------------------------------------- compute --

int run_compute(const std::string& state_path, const CommonFlags& flags,
                const std::string& dims_override, const std::string& units,
                const std::string& minimizer_path, const std::string& format,
                const std::string& out_path) {
    DensityMatrix sigma = read_state_file(state_path);
    if (!dims_override.empty()) {
        // reinterpret the bipartite cut; the value depends on it
        const BipartiteDims dims = parse_dims(dims_override);
        if (dims.total() != sigma.dims.total()) {
            throw ParseError("dims override does not match the matrix size");
        }
        sigma.dims = dims;
    }
    ConvexSetSpec cs{parse_set(flags.set_kind), sigma.dims, 1.0};
    const CertifiedValue v = ree(sigma, cs, make_options(flags, 1e-6));

    const double scale = units == "bits" ? 1.0 / std::log(2.0) : 1.0;
    if (!minimizer_path.empty()) write_state_file(minimizer_path, v.minimizer);

    if (format == "json") {
        nlohmann::json j = to_json(v);
        j["lower"] = v.lower * scale;
        j["upper"] = v.upper * scale;
        j["fwGap"] = v.fw_gap * scale;
        j["units"] = units;
        attach_timestamp(j, flags.deterministic);
        emit(j.dump(), out_path);
    } else {
        char line[256];
        std::snprintf(line, sizeof line,
                      "E in [%.9f, %.9f] %s  gap=%.3e x=%.9f iterations=%d confidence=%s%s",
                      v.lower * scale, v.upper * scale, units.c_str(), v.fw_gap * scale, v.x,
                      v.iterations, to_string(v.confidence), v.converged ? "" : " NOT-CONVERGED");
        emit(line, out_path);
    }
    return v.converged ? kExitOk : kExitNoConverge;
}

// ------------------------------------------------------------- continuity --

int run_continuity(int pairs, const std::string& dims_text, const CommonFlags& flags,
                   int rank, const std::string& format, const std::string& out_path) {
    const BipartiteDims dims = parse_dims(dims_text);
    ConvexSetSpec cs{parse_set(flags.set_kind), dims, 1.0};
    // batch runs adapt the per-pair tolerance below this ceiling
    SolverOptions opts = make_options(flags, 1e-3);
    PairSamplerConfig sampler;
    sampler.rank = rank;

    const BatchResult batch =
        batch_report(pairs, dims, sampler, cs, opts, flags.seed, thread_count());

    if (format == "csv") {
        emit(continuity_csv(batch), out_path);
    } else {
        nlohmann::json j = to_json(batch);
        attach_timestamp(j, flags.deterministic);
        emit(j.dump(), out_path);
    }
    std::fprintf(stderr, "pairs=%d failures=%zu maxRatio=%.6f\n", pairs,
                 batch.bound_failures.size() + batch.chain_failures.size(), batch.max_ratio);
    return batch.bound_failures.empty() && batch.chain_failures.empty() ? kExitOk
                                                                        : kExitViolation;
}

// ---------------------------------------------------------------- converge --

int run_converge(const std::string& state_path, const std::string& direction_path,
                  std::vector<long> schedule, const CommonFlags& flags, double dist_tol,
                  const std::string& format, const std::string& out_path) {
    const DensityMatrix sigma = read_state_file(state_path);
    const DensityMatrix zeta = read_state_file(direction_path);
    ConvexSetSpec cs{parse_set(flags.set_kind), sigma.dims, 1.0};
    const ConvergenceTrace trace =
        convergence_trace(sigma, zeta, std::move(schedule), cs, make_options(flags, 1e-6),
                        dist_tol);

    if (format == "json") {
        nlohmann::json j = to_json(trace);
        attach_timestamp(j, flags.deterministic);
        emit(j.dump(), out_path);
    } else {
        std::string text = "n,distToLimit,minimizerDist,eUpper\n";
        for (const auto& e : trace.entries) {
            char line[160];
            std::snprintf(line, sizeof line, "%ld,%.9f,%.9f,%.9f\n", e.n, e.dist_to_limit,
                          e.minimizer_dist, e.e_upper);
            text += line;
        }
        emit(text, out_path);
    }
    return trace.criterion_met ? kExitOk : kExitViolation;
}

// ----------------------------------------------------------------- fannes --

int run_fannes(int pairs, const std::string& dims_text, const CommonFlags& flags,
               int raw_pairs) {
    const BipartiteDims dims = parse_dims(dims_text);
    const int n = dims.total();
    int checked = 0, skipped = 0, violations = 0;
    double max_ratio = 0.0;

    const auto check_pair = [&](const DensityMatrix& a, const DensityMatrix& b) {
        const double T = trace_distance(a, b);
        if (T > 1.0 / 3.0) {
            ++skipped;
            return;
        }
        ++checked;
        const double lhs = std::abs(von_neumann_entropy(a) - von_neumann_entropy(b));
        const double rhs = fannes_bound(T, n);
        if (lhs > rhs + 1e-9) ++violations;
        if (rhs > 0.0) max_ratio = std::max(max_ratio, lhs / rhs);
    };

    // conditioned pairs: T <= 1/3 by construction
    for (int i = 0; i < pairs; ++i) {
        const auto [a, b] =
            detail::sample_pair(dims, PairSamplerConfig{}, derive_seed(flags.seed, i));
        check_pair(a, b);
    }
    // engineered boundary pair at T = 1/3
    {
        const DensityMatrix a = random_mixed(dims, n, derive_seed(flags.seed, 0xb0bULL));
        const DensityMatrix z = random_mixed(dims, n, derive_seed(flags.seed, 0xb0cULL));
        double t = (1.0 / 3.0) / trace_distance(a, z);
        DensityMatrix b = a;
        for (int guard = 0; guard < 8; ++guard) {
            b = validate_density((1.0 - t) * a.matrix + t * z.matrix, dims);
            const double T = trace_distance(a, b);
            if (T <= 1.0 / 3.0 && T >= 1.0 / 3.0 - 1e-9) break;
            t *= (1.0 / 3.0) / T * (1.0 - 1e-13);
        }
        check_pair(a, b);
    }
    // unconditioned pairs exercise the domain gate
    for (int i = 0; i < raw_pairs; ++i) {
        const DensityMatrix a = random_mixed(dims, n, derive_seed(flags.seed, 0xaa00ULL + i));
        const DensityMatrix b = random_mixed(dims, n, derive_seed(flags.seed, 0xbb00ULL + i));
        check_pair(a, b);
    }

    std::printf("fannes pairs=%d checked=%d skipped=%d violations=%d maxRatio=%.6f\n",
                pairs + 1 + raw_pairs, checked, skipped, violations, max_ratio);
    return violations == 0 ? kExitOk : kExitViolation;
}

// ------------------------------------------------------------------ chain --

int run_chain(int pairs, const std::string& dims_text, const CommonFlags& flags,
              const std::string& format, const std::string& out_path) {
    const BipartiteDims dims = parse_dims(dims_text);
    ConvexSetSpec cs{parse_set(flags.set_kind), dims, 1.0};
    SolverOptions opts = make_options(flags, 1e-3);

    const BatchResult batch = batch_report(pairs, dims, PairSamplerConfig{}, cs, opts,
                                           flags.seed, thread_count());

    struct Worst {
        double slack = std::numeric_limits<double>::infinity();
        double lhs = 0.0, rhs = 0.0;
    };
    std::map<std::string, Worst> worst;
    int violations = 0;
    for (const auto& rep : batch.reports) {
        for (const auto& c : rep.chain) {
            auto& w = worst[c.name];
            if (c.slack < w.slack) w = {c.slack, c.lhs, c.rhs};
            if (!c.holds) ++violations;
        }
    }

    if (format == "json") {
        nlohmann::json j = to_json(batch);
        attach_timestamp(j, flags.deterministic);
        emit(j.dump(), out_path);
    } else {
        std::string text = "inequality,minSlack,lhsAtMin,rhsAtMin\n";
        for (const auto& [name, w] : worst) {
            char line[200];
            std::snprintf(line, sizeof line, "%s,%.3e,%.9f,%.9f\n", name.c_str(), w.slack,
                          w.lhs, w.rhs);
            text += line;
        }
        emit(text, out_path);
    }
    std::fprintf(stderr, "chain pairs=%d violations=%d\n", pairs, violations);
    return violations == 0 ? kExitOk : kExitViolation;
}

// --------------------------------------------------------------- spectrum --

int run_spectrum(const std::string& state_path, const std::string& out_path) {
    const DensityMatrix s = read_state_file(state_path);
    emit(spectrum_csv(s), out_path);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certified relative entropy of entanglement and continuity checks"};
    app.require_subcommand(1);

    CommonFlags flags;

    // compute
    auto* compute = app.add_subcommand("compute", "certified E for a state file");
    std::string state_path, units = "nats", minimizer_path, format = "text", out_path;
    std::string compute_dims;
    compute->add_option("--state", state_path, "input state JSON")->required();
    compute->add_option("--dims", compute_dims, "override the bipartite cut, e.g. 4x1");
    compute->add_option("--units", units, "output units")->check(CLI::IsMember({"nats", "bits"}));
    compute->add_option("--out-minimizer", minimizer_path, "write the closest state here");
    compute->add_option("--format", format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    compute->add_option("--out", out_path, "write the report here instead of stdout");
    add_solver_flags(compute, flags);

    // continuity
    auto* continuity = app.add_subcommand("continuity", "sampled continuity-bound batch");
    int pairs = 10, rank = 0;
    std::string dims_text = "2x2", batch_format = "json";
    continuity->add_option("--pairs", pairs, "number of sampled pairs");
    continuity->add_option("--dims", dims_text, "bipartite dims, e.g. 2x2");
    continuity->add_option("--rank", rank, "sampler ancilla rank (0 = N)");
    continuity->add_option("--format", batch_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    continuity->add_option("--out", out_path, "write the report here");
    add_solver_flags(continuity, flags);

    // converge
    auto* converge = app.add_subcommand("converge", "closest-state convergence trace");
    std::string direction_path;
    std::vector<long> schedule{4, 16, 64, 256, 1024};
    double dist_tol = 0.05;
    converge->add_option("--state", state_path, "base state JSON (member of the set)")
        ->required();
    converge->add_option("--direction", direction_path, "direction state JSON")->required();
    converge->add_option("--schedule", schedule, "sequence indices n");
    converge->add_option("--dist-tol", dist_tol, "final-distance tolerance");
    converge->add_option("--format", batch_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    converge->add_option("--out", out_path, "write the report here");
    add_solver_flags(converge, flags);

    // fannes
    auto* fannes = app.add_subcommand("fannes", "entropy-continuity bound on sampled pairs");
    int raw_pairs = 50;
    fannes->add_option("--pairs", pairs, "number of conditioned pairs");
    fannes->add_option("--dims", dims_text, "bipartite dims, e.g. 2x2");
    fannes->add_option("--raw-pairs", raw_pairs, "independent pairs (skipped when T > 1/3)");
    fannes->add_option("--seed", flags.seed, "root seed");

    // chain
    auto* chain = app.add_subcommand("chain", "five-step inequality chain on sampled pairs");
    chain->add_option("--pairs", pairs, "number of sampled pairs");
    chain->add_option("--dims", dims_text, "bipartite dims, e.g. 2x2");
    chain->add_option("--format", batch_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    chain->add_option("--out", out_path, "write the report here");
    add_solver_flags(chain, flags);

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of a state file as CSV");
    spectrum->add_option("--state", state_path, "input state JSON")->required();
    spectrum->add_option("--out", out_path, "write the CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitInput;
    }

    try {
        if (compute->parsed()) {
            return run_compute(state_path, flags, compute_dims, units, minimizer_path, format,
                               out_path);
        }
        if (continuity->parsed()) {
            return run_continuity(pairs, dims_text, flags, rank, batch_format, out_path);
        }
        if (converge->parsed()) {
            return run_converge(state_path, direction_path, schedule, flags, dist_tol,
                                 batch_format, out_path);
        }
        if (fannes->parsed()) {
            return run_fannes(pairs, dims_text, flags, raw_pairs);
        }
        if (chain->parsed()) {
            return run_chain(pairs, dims_text, flags, batch_format, out_path);
        }
        if (spectrum->parsed()) {
            return run_spectrum(state_path, out_path);
        }
    } catch (const NotInSet& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitMembership;
    } catch (const ConvergenceFailure& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNoConverge;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const NotDensityMatrix& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }
    return kExitInput;
}
