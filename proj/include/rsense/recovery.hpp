#pragma once

// Sparse-recovery experiments: seeded sparse signals, noiseless measurement,
// orthogonal matching pursuit (OMP), iterative hard thresholding (IHT), and
// batched success-rate experiments with a CSV report.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsense/rng.hpp"
#include "rsense/sensing.hpp"
#include "rsense/util.hpp"

namespace rsense {

struct SparseSignal {
    i64 n = 0;
    std::vector<i64> support;  // ascending
    std::vector<cd> values;    // aligned with support

    std::vector<cd> dense() const {
        std::vector<cd> x(static_cast<size_t>(n), cd(0.0, 0.0));
        for (size_t t = 0; t < support.size(); ++t)
            x[static_cast<size_t>(support[t])] = values[t];
        return x;
    }

    double norm() const {
        double s = 0.0;
        for (const cd& v : values) s += std::norm(v);
        return std::sqrt(s);
    }
};

enum class Amplitude { Unit, Gaussian, Rademacher };

inline std::string amplitude_name(Amplitude a) {
    switch (a) {
        case Amplitude::Unit: return "unit";
        case Amplitude::Gaussian: return "gaussian";
        default: return "rademacher";
    }
}

inline Amplitude amplitude_from_name(const std::string& s) {
    if (s == "unit") return Amplitude::Unit;
    if (s == "gaussian") return Amplitude::Gaussian;
    if (s == "rademacher") return Amplitude::Rademacher;
    throw std::invalid_argument("unknown amplitude model '" + s + "'");
}

// K-sparse signal in dimension n with a uniformly random support. The
// generator draws the support first, then the values in ascending support
// order: unit = 1, rademacher = +/-1, gaussian = complex standard normal
// (real and imaginary N(0, 1/2), unit expected square norm per entry).
inline SparseSignal sample_sparse_signal(i64 n, i64 k, u64 seed,
                                         Amplitude amp) {
    if (n < 1) throw std::invalid_argument("sample_sparse_signal: n must be >= 1");
    if (k < 0 || k > n)
        throw std::invalid_argument(
            "sample_sparse_signal: sparsity must satisfy 0 <= K <= n");
    Rng rng(seed);
    SparseSignal x;
    x.n = n;
    x.support = rng.sample_distinct(n, k);
    std::sort(x.support.begin(), x.support.end());
    x.values.reserve(static_cast<size_t>(k));
    for (i64 t = 0; t < k; ++t) {
        switch (amp) {
            case Amplitude::Unit:
                x.values.emplace_back(1.0, 0.0);
                break;
            case Amplitude::Rademacher:
                x.values.emplace_back(rng.below(2) == 0 ? 1.0 : -1.0, 0.0);
                break;
            case Amplitude::Gaussian:
                x.values.emplace_back(rng.normal() / std::sqrt(2.0),
                                      rng.normal() / std::sqrt(2.0));
                break;
        }
    }
    return x;
}

struct Measurement {
    std::vector<cd> y;
    double rip_ratio = 1.0;  // ||Phi x||^2 / ||x||^2 (1.0 for x = 0)
};

inline Measurement measure(const SensingMatrix& mat, const SparseSignal& x) {
    if (x.n != mat.cols())
        throw std::invalid_argument("measure: signal dimension != column count");
    Measurement out;
    out.y.assign(static_cast<size_t>(mat.rows()), cd(0.0, 0.0));
    for (size_t t = 0; t < x.support.size(); ++t) {
        const auto col = mat.column(x.support[t]);
        for (size_t m = 0; m < out.y.size(); ++m) out.y[m] += x.values[t] * col[m];
    }
    double ny = 0.0;
    for (const cd& v : out.y) ny += std::norm(v);
    const double nx = x.norm();
    out.rip_ratio = nx > 0.0 ? ny / (nx * nx) : 1.0;
    return out;
}

struct RecoveryResult {
    SparseSignal estimate;
    i64 iterations = 0;
    std::vector<double> residual_norms;  // after each iteration
};

namespace detail {

inline Eigen::Map<const Eigen::MatrixXcd> eigen_view(const SensingMatrix& m) {
    return {m.data().data(), static_cast<Eigen::Index>(m.rows()),
            static_cast<Eigen::Index>(m.cols())};
}

inline std::string support_string(const std::vector<i64>& s) {
    std::string out = "[";
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

}  // namespace detail

// Orthogonal matching pursuit. Greedily selects the column with the largest
// |<phi_j, r>| (ties broken towards the smallest index), then re-solves the
// least-squares problem on the selected support. Stops after K selections,
// when the residual norm drops below `tol`, or when every remaining
// correlation is exactly zero. Throws if the selected columns become
// numerically dependent (condition number above 1e12) — with a deterministic
// matrix that names a structural problem worth surfacing, not noise.
inline RecoveryResult omp_recover(const SensingMatrix& mat,
                                  const std::vector<cd>& y, i64 K,
                                  double tol = 1e-10) {
    const i64 m = mat.rows(), n = mat.cols();
    if (static_cast<i64>(y.size()) != m)
        throw std::invalid_argument("omp_recover: measurement length != M");
    if (K < 0 || K > n)
        throw std::invalid_argument("omp_recover: need 0 <= K <= N");
    if (tol < 0.0) throw std::invalid_argument("omp_recover: tol must be >= 0");

    const auto phi = detail::eigen_view(mat);
    Eigen::VectorXcd yv(m);
    for (i64 i = 0; i < m; ++i) yv(i) = y[static_cast<size_t>(i)];
    Eigen::VectorXcd r = yv;
    const double ynorm = yv.norm();

    RecoveryResult out;
    std::vector<i64> support;
    std::vector<char> picked(static_cast<size_t>(n), 0);
    Eigen::VectorXcd coeff;
    double prev_norm = r.norm();
    for (i64 step = 0; step < K; ++step) {
        if (r.norm() < tol) break;
        i64 best = -1;
        double best_val = 0.0;
        for (i64 j = 0; j < n; ++j) {
            if (picked[static_cast<size_t>(j)]) continue;
            const double c = std::abs(phi.col(j).dot(r));  // conj(phi_j) . r
            if (c > best_val) {
                best_val = c;
                best = j;
            }
        }
        if (best < 0 || best_val == 0.0) break;
        support.push_back(best);
        picked[static_cast<size_t>(best)] = 1;

        const i64 s = static_cast<i64>(support.size());
        Eigen::MatrixXcd a(m, s);
        for (i64 t = 0; t < s; ++t)
            a.col(t) = phi.col(support[static_cast<size_t>(t)]);
        const Eigen::MatrixXcd gram = a.adjoint() * a;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram,
                                                           Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues()(0);
        const double hi = es.eigenvalues()(s - 1);
        if (!(lo > 0.0) || hi / lo > 1e12)
            throw std::runtime_error(
                "omp_recover: selected columns are numerically dependent "
                "(condition > 1e12) on support " +
                detail::support_string(support));
        coeff = gram.ldlt().solve(a.adjoint() * yv);
        r = yv - a * coeff;
        const double rn = r.norm();
        if (rn > prev_norm + 1e-10 * (ynorm + 1.0))
            throw std::logic_error(
                "omp_recover: residual norm increased after re-projection");
        prev_norm = rn;
        out.residual_norms.push_back(rn);
    }

    out.iterations = static_cast<i64>(support.size());
    std::vector<std::pair<i64, cd>> entries;
    for (size_t t = 0; t < support.size(); ++t)
        entries.emplace_back(support[t], coeff(static_cast<Eigen::Index>(t)));
    std::sort(entries.begin(), entries.end(),
              [](const auto& x, const auto& z) { return x.first < z.first; });
    out.estimate.n = n;
    for (const auto& [idx, val] : entries) {
        out.estimate.support.push_back(idx);
        out.estimate.values.push_back(val);
    }
    return out;
}

// Iterative hard thresholding: x <- H_K(x + step * Phi^H (y - Phi x)), where
// H_K keeps the K entries of largest magnitude (ties towards the smallest
// index). Stops when the residual improvement falls below `tol` or after
// max_iters; throws if the iterate norm exceeds 1e6 * (||y|| + 1), the
// usual signature of a too-large step.
inline RecoveryResult iht_recover(const SensingMatrix& mat,
                                  const std::vector<cd>& y, i64 K,
                                  double step = 1.0, i64 max_iters = 1000,
                                  double tol = 1e-12) {
    const i64 m = mat.rows(), n = mat.cols();
    if (static_cast<i64>(y.size()) != m)
        throw std::invalid_argument("iht_recover: measurement length != M");
    if (K < 0 || K > n)
        throw std::invalid_argument("iht_recover: need 0 <= K <= N");
    if (max_iters < 1)
        throw std::invalid_argument("iht_recover: max_iters must be >= 1");

    const auto phi = detail::eigen_view(mat);
    Eigen::VectorXcd yv(m);
    for (i64 i = 0; i < m; ++i) yv(i) = y[static_cast<size_t>(i)];
    const double ynorm = yv.norm();

    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
    RecoveryResult out;
    double prev_res = ynorm;
    std::vector<i64> order(static_cast<size_t>(n));
    for (i64 it = 0; it < max_iters; ++it) {
        const Eigen::VectorXcd z = x + step * (phi.adjoint() * (yv - phi * x));
        for (i64 j = 0; j < n; ++j) order[static_cast<size_t>(j)] = j;
        std::sort(order.begin(), order.end(), [&z](i64 a, i64 b) {
            const double ma = std::abs(z(a)), mb = std::abs(z(b));
            return ma != mb ? ma > mb : a < b;
        });
        Eigen::VectorXcd xn = Eigen::VectorXcd::Zero(n);
        for (i64 t = 0; t < K; ++t) {
            const i64 j = order[static_cast<size_t>(t)];
            xn(j) = z(j);
        }
        const double res = (yv - phi * xn).norm();
        x = xn;
        out.iterations = it + 1;
        out.residual_norms.push_back(res);
        if (x.norm() > 1e6 * (ynorm + 1.0))
            throw std::runtime_error(
                "iht_recover: iterate diverged; reduce the step size");
        if (prev_res - res < tol) break;
        prev_res = res;
    }

    out.estimate.n = n;
    for (i64 j = 0; j < n; ++j) {
        if (x(j) != cd(0.0, 0.0)) {
            out.estimate.support.push_back(j);
            out.estimate.values.push_back(x(j));
        }
    }
    return out;
}

enum class Algorithm { Omp, Iht };

inline std::string algorithm_name(Algorithm a) {
    return a == Algorithm::Omp ? "omp" : "iht";
}

inline Algorithm algorithm_from_name(const std::string& s) {
    if (s == "omp") return Algorithm::Omp;
    if (s == "iht") return Algorithm::Iht;
    throw std::invalid_argument("unknown algorithm '" + s + "'");
}

struct AlgorithmOptions {
    double omp_tol = 1e-10;
    double iht_step = 1.0;
    i64 iht_max_iters = 1000;
    double iht_tol = 1e-12;
};

struct RecoveryTrial {
    i64 p = 0;
    i64 k = 0;
    std::string variant;
    std::string algorithm;
    i64 K = 0;
    u64 seed = 0;
    SparseSignal signal;
    std::vector<cd> y;
    double rip_ratio = 1.0;
    SparseSignal estimate;
    i64 iterations = 0;
    bool support_exact = false;
    double rel_error = 0.0;
};

// One noiseless draw-measure-recover round trip; `seed` alone reproduces it.
inline RecoveryTrial run_trial(const SensingMatrix& mat, Algorithm algo, i64 K,
                               u64 seed, Amplitude amp,
                               const AlgorithmOptions& opt = {}) {
    RecoveryTrial tr;
    tr.p = mat.prime();
    tr.k = mat.power();
    tr.variant = variant_name(mat.variant());
    tr.algorithm = algorithm_name(algo);
    tr.K = K;
    tr.seed = seed;
    tr.signal = sample_sparse_signal(mat.cols(), K, seed, amp);
    Measurement ms = measure(mat, tr.signal);
    tr.y = std::move(ms.y);
    tr.rip_ratio = ms.rip_ratio;
    RecoveryResult rec =
        algo == Algorithm::Omp
            ? omp_recover(mat, tr.y, K, opt.omp_tol)
            : iht_recover(mat, tr.y, K, opt.iht_step, opt.iht_max_iters,
                          opt.iht_tol);
    tr.estimate = std::move(rec.estimate);
    tr.iterations = rec.iterations;
    tr.support_exact = tr.estimate.support == tr.signal.support;

    const std::vector<cd> xt = tr.signal.dense();
    const std::vector<cd> xe = tr.estimate.dense();
    double diff = 0.0;
    for (size_t i = 0; i < xt.size(); ++i) diff += std::norm(xe[i] - xt[i]);
    const double nx = tr.signal.norm();
    tr.rel_error = nx > 0.0 ? std::sqrt(diff) / nx : std::sqrt(diff);
    return tr;
}

struct ExperimentRow {
    i64 p = 0;
    i64 k = 0;
    std::string variant;
    std::string algorithm;
    i64 K = 0;
    i64 trials = 0;
    double success_rate = 0.0;
    double median_rel_err = 0.0;
    u64 seed = 0;
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;
    // success rates are expected to fall as K grows; a violation is sampling
    // noise worth flagging, not an error
    bool success_monotone = true;
};

// A trial counts as a success when the support is recovered exactly and the
// relative error is below 1e-6. Trial j of the K at position q in `Ks` uses
// seed ^ (q * trials + j), so each row and each trial is reproducible in
// isolation. `threads` parallelizes over trials without changing any result.
inline ExperimentResult run_experiment(const SensingMatrix& mat,
                                       const std::vector<i64>& Ks, i64 trials,
                                       Algorithm algo, Amplitude amp, u64 seed,
                                       const AlgorithmOptions& opt = {},
                                       i64 threads = 1) {
    if (trials < 1)
        throw std::invalid_argument("run_experiment: trials must be >= 1");
    if (Ks.empty())
        throw std::invalid_argument("run_experiment: no sparsity levels given");
    ExperimentResult res;
    for (size_t q = 0; q < Ks.size(); ++q) {
        const i64 K = Ks[q];
        std::vector<RecoveryTrial> batch(static_cast<size_t>(trials));
        parallel_for(trials, threads, [&](i64 j) {
            const u64 s = trial_seed(
                seed, static_cast<u64>(q) * static_cast<u64>(trials) +
                          static_cast<u64>(j));
            batch[static_cast<size_t>(j)] = run_trial(mat, algo, K, s, amp, opt);
        });
        ExperimentRow row;
        row.p = mat.prime();
        row.k = mat.power();
        row.variant = variant_name(mat.variant());
        row.algorithm = algorithm_name(algo);
        row.K = K;
        row.trials = trials;
        row.seed = seed;
        i64 good = 0;
        std::vector<double> errs;
        errs.reserve(static_cast<size_t>(trials));
        for (const RecoveryTrial& tr : batch) {
            if (tr.support_exact && tr.rel_error < 1e-6) ++good;
            errs.push_back(tr.rel_error);
        }
        row.success_rate =
            static_cast<double>(good) / static_cast<double>(trials);
        row.median_rel_err = median_of(std::move(errs));
        if (!res.rows.empty() && row.K > res.rows.back().K &&
            row.success_rate > res.rows.back().success_rate)
            res.success_monotone = false;
        res.rows.push_back(std::move(row));
    }
    return res;
}

// CSV schema: p,k,variant,algorithm,K,trials,success_rate,median_rel_err,seed
inline void write_experiment_csv(std::ostream& os,
                                 const std::vector<ExperimentRow>& rows) {
    os << "p,k,variant,algorithm,K,trials,success_rate,median_rel_err,seed\n";
    for (const ExperimentRow& r : rows) {
        os << r.p << ',' << r.k << ',' << r.variant << ',' << r.algorithm << ','
           << r.K << ',' << r.trials << ',' << fmt17(r.success_rate) << ','
           << fmt17(r.median_rel_err) << ',' << r.seed << "\n";
    }
}

}  // namespace rsense
