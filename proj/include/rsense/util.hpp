#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rsense {

using i64 = std::int64_t;
using u64 = std::uint64_t;

// Default cap on enumeration work (pair evaluations); the CLI lets the
// RESIDUE_SENSE_BUDGET environment variable override it.
inline constexpr u64 kDefaultBudget = 100'000'000ULL;

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// C(n, k) saturated at `cap + 1` so callers can compare against a budget
// without overflow.
inline u64 binomial_capped(i64 n, i64 k, u64 cap) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    u64 r = 1;
    for (i64 i = 1; i <= k; ++i) {
        if (r > cap) return cap + 1;
        r = r * static_cast<u64>(n - k + i) / static_cast<u64>(i);
    }
    return r > cap ? cap + 1 : r;
}

// Advances an ascending k-subset of {0,...,n-1} to its lexicographic
// successor. Returns false once the last subset has been consumed.
inline bool next_combination(std::vector<i64>& c, i64 n) {
    const i64 k = static_cast<i64>(c.size());
    i64 i = k - 1;
    while (i >= 0 && c[static_cast<size_t>(i)] == n - k + i) --i;
    if (i < 0) return false;
    ++c[static_cast<size_t>(i)];
    for (i64 j = i + 1; j < k; ++j)
        c[static_cast<size_t>(j)] = c[static_cast<size_t>(j - 1)] + 1;
    return true;
}

inline std::vector<i64> first_combination(i64 k) {
    std::vector<i64> c(static_cast<size_t>(k));
    for (i64 i = 0; i < k; ++i) c[static_cast<size_t>(i)] = i;
    return c;
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median_of: empty sample");
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// %.17g round-trips doubles exactly; used by every text format we emit.
inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Runs f(0), ..., f(n-1) on up to `threads` threads in contiguous chunks.
// Each call must touch only its own output slot, so results are identical
// to a serial run regardless of scheduling. The first exception thrown by
// any worker is re-thrown on the caller's thread.
template <class F>
void parallel_for(i64 n, i64 threads, F&& f) {
    if (threads <= 1 || n <= 1) {
        for (i64 i = 0; i < n; ++i) f(i);
        return;
    }
    const i64 workers = std::min<i64>(threads, n);
    std::vector<std::thread> pool;
    std::mutex err_mutex;
    std::exception_ptr first_error;
    const i64 chunk = (n + workers - 1) / workers;
    for (i64 w = 0; w < workers; ++w) {
        const i64 lo = w * chunk;
        const i64 hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                for (i64 i = lo; i < hi; ++i) f(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace rsense
