// rsense: command-line front end for the residue-sense library.
//
// Subcommands: gen, verify, rip, doublesum, recover, primes, params.
// Every command is deterministic for fixed arguments (seeds default to 0);
// file outputs carry no timestamps — those go to a "<out>.meta.json"
// sidecar. Exit codes: 0 success, 1 a verification or bound failure,
// 2 usage or domain error.

#include <CLI11.hpp>

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rsense/json_out.hpp"
#include "rsense/rsense.hpp"

namespace {

using namespace rsense;

std::string g_argv_line;

u64 enumeration_budget() {
    const char* env = std::getenv("RESIDUE_SENSE_BUDGET");
    if (!env) return kDefaultBudget;
    try {
        size_t used = 0;
        const unsigned long long v = std::stoull(env, &used);
        if (used != std::string(env).size() || v == 0)
            throw std::invalid_argument("");
        return static_cast<u64>(v);
    } catch (const std::exception&) {
        throw std::invalid_argument(
            "RESIDUE_SENSE_BUDGET must be a positive integer, got '" +
            std::string(env) + "'");
    }
}

void write_sidecar(const std::string& out_path) {
    std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    json meta{{"command_line", g_argv_line}, {"written_at", buf}};
    std::ofstream os(out_path + ".meta.json");
    if (os) os << meta.dump(2) << "\n";
}

// Writes body to the path, or to stdout when path is empty or "-". File
// outputs get a timestamped sidecar so the payload itself stays
// byte-reproducible.
void emit(const std::string& out_path, const std::string& body) {
    if (out_path.empty() || out_path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("cannot open for writing: " + out_path);
    os << body;
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + out_path);
    write_sidecar(out_path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

SensingMatrix build_matrix(i64 p, i64 k, bool paley) {
    PrimeField field(p);
    return paley ? SensingMatrix::paley(field)
                 : SensingMatrix::power_residue(field, k);
}

// Coherence via the Gauss-sum route for power-residue matrices: all column
// inner products equal G_k(a_i - a_j)/p, so the maximum over non-zero
// differences gives mu in O(p^2 / k) instead of O(N^2 M).
double matrix_coherence(const SensingMatrix& mat) {
    if (mat.cols() <= 2000) return coherence(mat).mu;
    PrimeField field(mat.prime());
    const i64 p = mat.prime();
    const ResidueSet residues = kth_power_residues(field, mat.power());
    double worst = 0.0;
    for (i64 d = 1; d < p; ++d) {
        cd s(1.0, 0.0);  // x = 0 term of G_k(d)
        for (i64 b : residues.elements)
            s += static_cast<double>(mat.power()) * unit_root(d * b, p);
        worst = std::max(worst, std::abs(s) / static_cast<double>(p));
    }
    if (mat.variant() == MatrixVariant::Paley)
        worst = std::max(worst, 1.0 / std::sqrt(static_cast<double>(p)));
    return worst;
}

int run_gen(i64 p, i64 k, bool paley, std::string out) {
    const SensingMatrix mat = build_matrix(p, k, paley);
    if (out.empty()) {
        std::ostringstream name;
        name << "phi_p" << p << (paley ? "_paley" : "_k" + std::to_string(k))
             << ".phipk";
        out = name.str();
    }
    {
        std::ofstream os(out);
        if (!os) throw std::runtime_error("cannot open for writing: " + out);
        mat.write(os);
        os.flush();
        if (!os) throw std::runtime_error("write failed: " + out);
        write_sidecar(out);
    }
    std::cout << "variant = " << variant_name(mat.variant()) << "\n"
              << "p = " << mat.prime() << "\n"
              << "k = " << mat.power() << "\n"
              << "M = " << mat.rows() << "\n"
              << "N = " << mat.cols() << "\n"
              << "compression_ratio = " << fmt17(compression_ratio(mat)) << "\n"
              << "coherence = " << fmt17(matrix_coherence(mat)) << "\n"
              << "out = " << out << "\n";
    return 0;
}

int run_verify(i64 p_max, u64 seed, i64 chain_pairs, i64 threads,
               const std::string& out) {
    const VerifySummary sum = verify_sweep(p_max, seed, chain_pairs, threads);
    json params{{"p_max", p_max},
                {"seed", seed},
                {"chain_pairs", chain_pairs},
                {"threads", threads}};
    emit(out, dump(report_envelope("verify", params, json(sum))));
    if (!sum.pass) {
        for (const CheckAggregate& c : sum.checks)
            if (!c.pass)
                std::cerr << "verification failed: " << c.name
                          << " worst=" << fmt17(c.worst) << " tolerance="
                          << fmt17(c.tolerance) << " at " << c.witness << "\n";
        return 1;
    }
    return 0;
}

int run_rip(i64 p, i64 k, bool paley, i64 K, const std::string& mode,
            i64 trials, u64 seed, bool with_delta, const std::string& out) {
    const SensingMatrix mat = build_matrix(p, k, paley);
    const u64 budget = enumeration_budget();
    json report;
    FlatRipReport flat;
    if (mode == "exhaustive")
        flat = flat_rip_exhaustive(mat, K, budget);
    else if (mode == "sampled")
        flat = flat_rip_sampled(mat, K, trials, seed);
    else
        throw std::invalid_argument("rip: mode must be exhaustive or sampled");
    report["flat_rip"] = flat;
    if (K >= 2)
        report["rip_from_flat_bound"] = rip_from_flat(flat.theta, K);
    if (with_delta) report["rip_delta"] = rip_delta_exhaustive(mat, K, budget);
    json params{{"p", p},         {"k", mat.power()}, {"variant",
                variant_name(mat.variant())},         {"K", K},
                {"mode", mode},   {"trials", trials}, {"seed", seed},
                {"budget", budget}};
    emit(out, dump(report_envelope("rip", params, report)));
    return 0;
}

int run_doublesum(i64 p, i64 k, i64 h, const std::string& check, double alpha,
                  double beta, double tau, const std::string& mode, i64 trials,
                  u64 seed, i64 size_min, i64 size_max,
                  const std::string& out) {
    PrimeField field(p);
    MultChar chi(field, k, h);
    json params{{"p", p},       {"k", k},           {"h", h},
                {"check", check}, {"alpha", alpha}, {"beta", beta},
                {"trials", trials}, {"seed", seed}};
    json report;
    if (check == "cancellation") {
        PropertyPOptions opt;
        opt.alpha = alpha;
        opt.beta = beta;
        opt.exhaustive = mode == "exhaustive";
        opt.trials = trials;
        opt.seed = seed;
        opt.size_min = size_min;
        opt.size_max = size_max;
        opt.budget = enumeration_budget();
        params["mode"] = mode;
        params["size_min"] = size_min;
        params["size_max"] = size_max;
        params["budget"] = opt.budget;
        report = test_property_P(chi, opt);
    } else if (check == "sqrt") {
        DoubleSumBoundOptions opt;
        opt.alpha = alpha;
        opt.beta = beta;
        opt.tau = tau;
        opt.trials = trials;
        opt.seed = seed;
        params["tau"] = tau;
        report = verify_doublesum_bound(chi, opt);
    } else {
        throw std::invalid_argument(
            "doublesum: check must be cancellation or sqrt");
    }
    emit(out, dump(report_envelope("doublesum", params, report)));
    // violations of the conjectural bounds are data, not failures
    return 0;
}

int run_recover(i64 p, i64 k, bool paley, std::vector<i64> Ks, i64 trials,
                const std::string& alg, const std::string& amp, u64 seed,
                i64 threads, const AlgorithmOptions& opt,
                const std::string& out) {
    const SensingMatrix mat = build_matrix(p, k, paley);
    const ExperimentResult res =
        run_experiment(mat, Ks, trials, algorithm_from_name(alg),
                       amplitude_from_name(amp), seed, opt, threads);
    if (!res.success_monotone)
        std::cerr << "warning: success rate is not non-increasing in K "
                     "(sampling noise)\n";
    std::ostringstream body;
    write_experiment_csv(body, res.rows);
    emit(out, body.str());
    return 0;
}

int run_primes(const std::vector<i64>& xs, double eps1, double eps2,
               const std::string& out, const std::string& hits_out) {
    const std::vector<DensityRow> rows = shifted_prime_density(xs, eps1, eps2);
    std::ostringstream body;
    write_density_csv(body, rows);
    emit(out, body.str());
    if (!hits_out.empty()) {
        if (xs.size() != 1)
            throw std::invalid_argument(
                "primes: --hits-out needs exactly one --x value");
        const auto hits = primes_with_factor_in_range(xs[0], eps1, eps2);
        std::ostringstream hb;
        write_hits_csv(hb, hits);
        emit(hits_out, hb.str());
    }
    return 0;
}

int run_params(const AnalysisParams& q, const std::string& out) {
    const ParamValidation v = validate_params(q);
    json params{{"alpha", q.alpha},
                {"beta0", q.beta0},
                {"eps1", q.eps1},
                {"eps2", q.eps2},
                {"tau", q.tau}};
    emit(out, dump(report_envelope("params", params, json(v))));
    return v.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    std::ostringstream al;
    for (int i = 0; i < argc; ++i) {
        if (i) al << ' ';
        al << argv[i];
    }
    g_argv_line = al.str();

    CLI::App app{
        "residue-sense: deterministic sensing matrices from k-th power "
        "residues, their verification, and recovery experiments"};
    app.set_version_flag("--version", std::string(kToolName) + " " +
                                          kToolVersion);
    app.require_subcommand(1);
    int rc = 0;

    // gen
    {
        auto* c = app.add_subcommand("gen",
                                     "construct a sensing matrix and write it "
                                     "as a PHIPK v1 file");
        auto p = std::make_shared<i64>(0);
        auto k = std::make_shared<i64>(2);
        auto paley = std::make_shared<bool>(false);
        auto out = std::make_shared<std::string>();
        c->add_option("--p", *p, "odd prime modulus")->required();
        c->add_option("--k", *k, "divisor of p-1 (power-residue order)");
        c->add_flag("--paley", *paley, "build the Paley variant (k = 2)");
        c->add_option("--out", *out,
                      "output path (default phi_p<p>_k<k>.phipk)");
        c->callback([=, &rc] { rc = run_gen(*p, *k, *paley, *out); });
    }

    // verify
    {
        auto* c = app.add_subcommand(
            "verify", "sweep all odd primes up to --pmax and check the "
                      "construction's identities and bounds");
        auto pmax = std::make_shared<i64>(0);
        auto seed = std::make_shared<u64>(0);
        auto pairs = std::make_shared<i64>(10);
        auto threads = std::make_shared<i64>(1);
        auto out = std::make_shared<std::string>();
        c->add_option("--pmax", *pmax, "largest prime to check")->required();
        c->add_option("--seed", *seed, "seed for the sampled subset pairs");
        c->add_option("--chain-pairs", *pairs,
                      "seeded subset pairs per (p, k) for the chain checks");
        c->add_option("--threads", *threads, "worker threads");
        c->add_option("--out", *out, "JSON report path (default stdout)");
        c->callback(
            [=, &rc] { rc = run_verify(*pmax, *seed, *pairs, *threads, *out); });
    }

    // rip
    {
        auto* c = app.add_subcommand(
            "rip", "flat-RIP constant (exhaustive or sampled) and optional "
                   "exact RIP constant");
        auto p = std::make_shared<i64>(0);
        auto k = std::make_shared<i64>(2);
        auto paley = std::make_shared<bool>(false);
        auto K = std::make_shared<i64>(0);
        auto mode = std::make_shared<std::string>("exhaustive");
        auto trials = std::make_shared<i64>(1000);
        auto seed = std::make_shared<u64>(0);
        auto delta = std::make_shared<bool>(false);
        auto out = std::make_shared<std::string>();
        c->add_option("--p", *p, "odd prime modulus")->required();
        c->add_option("--k", *k, "divisor of p-1");
        c->add_flag("--paley", *paley, "use the Paley variant");
        c->add_option("--K", *K, "sparsity level")->required();
        c->add_option("--mode", *mode, "exhaustive or sampled");
        c->add_option("--trials", *trials, "sampled-mode trials");
        c->add_option("--seed", *seed, "sampled-mode seed");
        c->add_flag("--delta", *delta,
                    "also compute the exact RIP constant delta(K)");
        c->add_option("--out", *out, "JSON report path (default stdout)");
        c->callback([=, &rc] {
            rc = run_rip(*p, *k, *paley, *K, *mode, *trials, *seed, *delta,
                         *out);
        });
    }

    // doublesum
    {
        auto* c = app.add_subcommand(
            "doublesum", "bilinear character-sum experiments: the "
                         "cancellation property or the square-root bound");
        // long-only help so the short name stays free for the --h exponent
        c->set_help_flag("--help", "print this help message and exit");
        auto p = std::make_shared<i64>(0);
        auto k = std::make_shared<i64>(2);
        auto h = std::make_shared<i64>(1);
        auto check = std::make_shared<std::string>("cancellation");
        auto alpha = std::make_shared<double>(0.0);
        auto beta = std::make_shared<double>(0.0);
        auto tau = std::make_shared<double>(0.0);
        auto mode = std::make_shared<std::string>("sampled");
        auto trials = std::make_shared<i64>(200);
        auto seed = std::make_shared<u64>(0);
        auto smin = std::make_shared<i64>(0);
        auto smax = std::make_shared<i64>(0);
        auto out = std::make_shared<std::string>();
        c->add_option("--p", *p, "odd prime modulus")->required();
        c->add_option("--k", *k, "character order divisor");
        c->add_option("--h", *h, "character exponent (1..k-1)");
        c->add_option("--check", *check, "cancellation or sqrt");
        c->add_option("--alpha", *alpha, "size exponent")->required();
        c->add_option("--beta", *beta, "cancellation exponent")->required();
        c->add_option("--tau", *tau, "bound exponent (sqrt check)");
        c->add_option("--mode", *mode,
                      "sampled or exhaustive (cancellation check)");
        c->add_option("--trials", *trials, "sampled trials");
        c->add_option("--seed", *seed, "sampling seed");
        c->add_option("--size-min", *smin,
                      "narrow the subset-size range (0 = default)");
        c->add_option("--size-max", *smax,
                      "narrow the subset-size range (0 = default)");
        c->add_option("--out", *out, "JSON report path (default stdout)");
        c->callback([=, &rc] {
            rc = run_doublesum(*p, *k, *h, *check, *alpha, *beta, *tau, *mode,
                               *trials, *seed, *smin, *smax, *out);
        });
    }

    // recover
    {
        auto* c = app.add_subcommand(
            "recover", "sparse-recovery success-rate experiment (CSV)");
        auto p = std::make_shared<i64>(0);
        auto k = std::make_shared<i64>(2);
        auto paley = std::make_shared<bool>(false);
        auto Ks = std::make_shared<std::vector<i64>>();
        auto trials = std::make_shared<i64>(100);
        auto alg = std::make_shared<std::string>("omp");
        auto amp = std::make_shared<std::string>("unit");
        auto seed = std::make_shared<u64>(0);
        auto threads = std::make_shared<i64>(1);
        auto opt = std::make_shared<AlgorithmOptions>();
        auto out = std::make_shared<std::string>();
        c->add_option("--p", *p, "odd prime modulus")->required();
        c->add_option("--k", *k, "divisor of p-1");
        c->add_flag("--paley", *paley, "use the Paley variant");
        c->add_option("--K", *Ks, "sparsity levels (comma-separated)")
            ->required()
            ->delimiter(',');
        c->add_option("--trials", *trials, "trials per sparsity level");
        c->add_option("--alg", *alg, "omp or iht");
        c->add_option("--amp", *amp, "unit, gaussian, or rademacher");
        c->add_option("--seed", *seed, "base seed");
        c->add_option("--threads", *threads, "worker threads");
        c->add_option("--omp-tol", opt->omp_tol, "OMP residual stop");
        c->add_option("--iht-step", opt->iht_step, "IHT step size");
        c->add_option("--iht-iters", opt->iht_max_iters, "IHT max iterations");
        c->add_option("--iht-tol", opt->iht_tol, "IHT improvement stop");
        c->add_option("--out", *out, "CSV path (default stdout)");
        c->callback([=, &rc] {
            rc = run_recover(*p, *k, *paley, *Ks, *trials, *alg, *amp, *seed,
                             *threads, *opt, *out);
        });
    }

    // primes
    {
        auto* c = app.add_subcommand(
            "primes", "density of primes p <= x whose shifted prime p-1 has "
                      "a divisor in (x^eps1, x^eps2]");
        auto xs = std::make_shared<std::vector<i64>>();
        auto e1 = std::make_shared<double>(0.0);
        auto e2 = std::make_shared<double>(0.0);
        auto out = std::make_shared<std::string>();
        auto hits = std::make_shared<std::string>();
        c->add_option("--x", *xs, "bounds x (comma-separated)")
            ->required()
            ->delimiter(',');
        c->add_option("--eps1", *e1, "lower window exponent")->required();
        c->add_option("--eps2", *e2, "upper window exponent")->required();
        c->add_option("--out", *out, "CSV path (default stdout)");
        c->add_option("--hits-out", *hits,
                      "also write the p,k hit list (single --x only)");
        c->callback([=, &rc] { rc = run_primes(*xs, *e1, *e2, *out, *hits); });
    }

    // params
    {
        auto* c = app.add_subcommand(
            "params", "validate an (alpha, beta0, eps1, eps2, tau) tuple and "
                      "report gamma");
        auto q = std::make_shared<AnalysisParams>();
        auto out = std::make_shared<std::string>();
        c->add_option("--alpha", q->alpha, "")->required();
        c->add_option("--beta0", q->beta0, "")->required();
        c->add_option("--eps1", q->eps1, "")->required();
        c->add_option("--eps2", q->eps2, "")->required();
        c->add_option("--tau", q->tau, "")->required();
        c->add_option("--out", *out, "JSON report path (default stdout)");
        c->callback([=, &rc] { rc = run_params(*q, *out); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
