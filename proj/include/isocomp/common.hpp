#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace isocomp {

inline constexpr const char* kVersion = "1.0.0";

/// Bad arguments or a violated operation precondition. CLI exit code 2.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Work refused because it exceeds an enumeration budget or ball radius.
/// CLI exit code 3.
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Evaluation would silently need values outside the enumerated domain.
struct PrecisionError : std::runtime_error {
    explicit PrecisionError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Internal invariant failed (a certificate did not recompute, a produced
/// curve was not monotone, ...). CLI exit code 1.
struct InvariantError : std::runtime_error {
    explicit InvariantError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Compensated (Kahan) accumulator; used for every norm reduction so that
/// 1e-10/1e-12 tolerances survive million-term sums.
class KahanSum {
public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline uint64_t fnv1a64(const void* data, size_t n, uint64_t seed = 0xcbf29ce484222325ull) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    uint64_t h = seed;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Deterministic RNG wrapper: raw 64-bit words from splitmix64, so that
/// "same seed => bit-identical output" holds independently of the standard
/// library's distribution implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    /// uniform in [0,1)
    double nextDouble() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    /// uniform in [0, n)
    uint64_t nextBelow(uint64_t n) { return next() % n; }

private:
    uint64_t state_;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y = a*x + b.
inline LineFit leastSquares(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw UsageError("leastSquares: need >= 2 points");
    double n = static_cast<double>(x.size());
    KahanSum sx, sy, sxx, sxy;
    for (size_t i = 0; i < x.size(); ++i) {
        sx.add(x[i]);
        sy.add(y[i]);
        sxx.add(x[i] * x[i]);
        sxy.add(x[i] * y[i]);
    }
    double det = n * sxx.value() - sx.value() * sx.value();
    if (det == 0) throw UsageError("leastSquares: degenerate abscissae");
    LineFit f;
    f.slope = (n * sxy.value() - sx.value() * sy.value()) / det;
    f.intercept = (sy.value() - f.slope * sx.value()) / n;
    return f;
}

}  // namespace isocomp
