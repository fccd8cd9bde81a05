#include "isocomp/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace isocomp {

XiSequence build_xi(const CompressionModulus& f, double p, int N) {
    if (N < 2) throw UsageError("build_xi: N must be >= 2");
    if (p < 1) throw UsageError("build_xi: p must be >= 1");
    XiSequence xs;
    xs.p = p;
    try {
        xs.cpWarning = check_Cp(f, p).verdict == CpVerdict::Diverges;
    } catch (const UsageError&) {
        throw;  // non-monotone f is still refused
    }
    xs.xi.assign(N + 1, 0.0);
    for (int j = 1; j + 1 <= N; ++j)
        xs.xi[j + 1] = xs.xi[j] + f.eval(j) * std::pow(static_cast<double>(j), -1.0 - 1.0 / p);
    return xs;
}

double CompressionCurve::at(int t) const {
    if (t < 1 || t > tmax()) throw UsageError("CompressionCurve: t out of range");
    return rho[t - 1];
}

double CompressionCurve::interp(double t) const {
    if (t <= 1.0) return rho.front();
    if (t >= tmax()) return rho.back();
    int lo = static_cast<int>(std::floor(t));
    double w = t - lo;
    return rho[lo - 1] * (1 - w) + rho[lo] * w;
}

void CompressionCurve::validate() const {
    for (size_t i = 0; i + 1 < rho.size(); ++i)
        if (rho[i] > rho[i + 1] * (1 + 1e-12))
            throw InvariantError("CompressionCurve: not nondecreasing");
    for (size_t i = 0; i < rho.size(); ++i)
        if (rho[i] > lipschitz * static_cast<double>(i + 1) * (1 + 1e-9))
            throw InvariantError("CompressionCurve: exceeds Lipschitz * t");
}

double tree_pair_distance_p(int depthX, int depthY, int depthMeet, const XiSequence& xs) {
    if (depthMeet > std::min(depthX, depthY))
        throw UsageError("tree_pair_distance_p: the meet cannot be deeper than the vertices");
    const double p = xs.p;
    int k = depthX - depthMeet, kp = depthY - depthMeet;
    KahanSum s;
    for (int i = 1; i <= k; ++i) s.add(std::pow(xs.at(i + 1), p));
    for (int i = 1; i <= kp; ++i) s.add(std::pow(xs.at(i + 1), p));
    for (int j = 0; j <= depthMeet; ++j) {
        double d = std::fabs(xs.at(k + j + 2) - xs.at(kp + j + 2));
        if (d != 0.0) s.add(std::pow(d, p));
    }
    return s.value();
}

namespace {

double lipschitzOfDepth(int maxDepth, const XiSequence& xs) {
    // an edge between depths l and l-1 realizes xi_2^p + sum_{i=2}^{l+1} (dxi_i)^p
    double best = 0.0;
    KahanSum s;
    s.add(std::pow(xs.at(2), xs.p));
    for (int l = 1; l <= maxDepth; ++l) {
        s.add(std::pow(xs.at(l + 2) - xs.at(l + 1), xs.p));
        best = std::max(best, s.value());
    }
    return std::pow(best, 1.0 / xs.p);
}

void requireXiLength(const XiSequence& xs, int maxDepth, const char* who) {
    if (static_cast<int>(xs.size()) < maxDepth + 3)
        throw UsageError(std::string(who) + ": xi sequence too short for depth " +
                         std::to_string(maxDepth) + " (need N >= depth + 2)");
}

}  // namespace

CompressionCurve tree_compression_curve_binary(int J, const XiSequence& xs) {
    if (J < 1 || J > 20) throw ResourceError("tree_compression_curve_binary: J must be in [1,20]");
    requireXiLength(xs, J, "tree_compression_curve_binary");
    const double inf = std::numeric_limits<double>::infinity();
    CompressionCurve curve;
    curve.rho.assign(2 * J, inf);
    // every triple dz <= dx <= dy <= J with dx + dy - 2 dz >= 1 is realized
    // in T_J (distinct child subtrees under the meet, or an ancestor pair)
    for (int dx = 0; dx <= J; ++dx)
        for (int dy = dx; dy <= J; ++dy)
            for (int dz = 0; dz <= dx; ++dz) {
                int d = dx + dy - 2 * dz;
                if (d < 1) continue;
                double norm = std::pow(tree_pair_distance_p(dx, dy, dz, xs), 1.0 / xs.p);
                if (norm < curve.rho[d - 1]) curve.rho[d - 1] = norm;
            }
    // rho(t) = inf over d >= t: suffix minimum
    for (int t = 2 * J - 1; t >= 1; --t)
        curve.rho[t - 1] = std::min(curve.rho[t - 1], curve.rho[t]);
    curve.lipschitz = lipschitzOfDepth(J, xs);
    curve.validate();
    return curve;
}

CompressionCurve tree_compression_curve_general(const std::vector<int32_t>& parent,
                                                const XiSequence& xs) {
    const int n = static_cast<int>(parent.size());
    if (n < 2) throw UsageError("tree_compression_curve_general: need >= 2 vertices");
    if (n > 10000) throw ResourceError("tree_compression_curve_general: > 10^4 vertices");
    std::vector<int> depth(n, 0);
    int root = -1;
    for (int v = 0; v < n; ++v) {
        if (parent[v] < 0) {
            if (root >= 0) throw UsageError("tree_compression_curve_general: two roots");
            root = v;
        } else if (parent[v] >= v) {
            throw UsageError("tree_compression_curve_general: vertices must be in BFS order");
        } else {
            depth[v] = depth[parent[v]] + 1;
        }
    }
    if (root != 0) throw UsageError("tree_compression_curve_general: root must be vertex 0");
    int maxDepth = *std::max_element(depth.begin(), depth.end());
    requireXiLength(xs, maxDepth, "tree_compression_curve_general");

    // binary-lifting ancestors for O(log) meets
    int LOG = 1;
    while ((1 << LOG) <= maxDepth) ++LOG;
    std::vector<std::vector<int32_t>> up(LOG, std::vector<int32_t>(n));
    for (int v = 0; v < n; ++v) up[0][v] = parent[v] < 0 ? v : parent[v];
    for (int k = 1; k < LOG; ++k)
        for (int v = 0; v < n; ++v) up[k][v] = up[k - 1][up[k - 1][v]];
    auto meetDepth = [&](int x, int y) {
        if (depth[x] < depth[y]) std::swap(x, y);
        int diff = depth[x] - depth[y];
        for (int k = 0; k < LOG; ++k)
            if (diff >> k & 1) x = up[k][x];
        if (x == y) return depth[x];
        for (int k = LOG - 1; k >= 0; --k)
            if (up[k][x] != up[k][y]) {
                x = up[k][x];
                y = up[k][y];
            }
        return depth[x] - 1;
    };

    const double inf = std::numeric_limits<double>::infinity();
    CompressionCurve curve;
    curve.rho.assign(2 * maxDepth, inf);
    // distinct realized triples only, memoized by (dx, dy, dz)
    std::unordered_map<int64_t, double> cache;
    int maxDist = 0;
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
            int dz = meetDepth(x, y);
            int d = depth[x] + depth[y] - 2 * dz;
            maxDist = std::max(maxDist, d);
            int64_t key = (static_cast<int64_t>(depth[x]) * 16384 + depth[y]) * 16384 + dz;
            auto it = cache.find(key);
            double val;
            if (it != cache.end()) {
                val = it->second;
            } else {
                val = std::pow(tree_pair_distance_p(depth[x], depth[y], dz, xs), 1.0 / xs.p);
                cache.emplace(key, val);
            }
            if (val < curve.rho[d - 1]) curve.rho[d - 1] = val;
        }
    curve.rho.resize(maxDist);  // rho is only defined where pairs exist
    for (int t = maxDist - 1; t >= 1; --t)
        curve.rho[t - 1] = std::min(curve.rho[t - 1], curve.rho[t]);
    curve.lipschitz = lipschitzOfDepth(maxDepth, xs);
    curve.validate();
    return curve;
}

double bourgain_integral(const CompressionCurve& curve, double q, int J, double lipschitz) {
    if (q <= 1) throw UsageError("bourgain_integral: q must be > 1");
    if (lipschitz <= 0) throw UsageError("bourgain_integral: Lipschitz constant must be > 0");
    if (curve.tmax() < 2 * J) throw UsageError("bourgain_integral: curve shorter than [1, 2J]");
    auto integrand = [&](double t) {
        double r = curve.interp(t) / lipschitz;
        return std::pow(r / t, q) / t;
    };
    // dyadic trapezoid grid, refined by halving to 1e-9 relative
    KahanSum total;
    double lo = 1.0;
    while (lo < 2.0 * J) {
        double hi = std::min(lo * 2.0, 2.0 * J);
        int m = 8;
        double prev = 0;
        for (int depth = 0; depth < 16; ++depth) {
            double h = (hi - lo) / m;
            double sum = 0.5 * (integrand(lo) + integrand(hi));
            for (int i = 1; i < m; ++i) sum += integrand(lo + i * h);
            sum *= h;
            if (depth > 0 && std::fabs(sum - prev) <= 1e-9 * std::max(sum, 1e-300)) {
                prev = sum;
                break;
            }
            prev = sum;
            m *= 2;
        }
        total.add(prev);
        lo = hi;
    }
    return total.value();
}

double tree_min_ratio_binary(int J, const XiSequence& xs) {
    requireXiLength(xs, J, "tree_min_ratio_binary");
    double best = std::numeric_limits<double>::infinity();
    for (int dx = 0; dx <= J; ++dx)
        for (int dy = dx; dy <= J; ++dy)
            for (int dz = 0; dz <= dx; ++dz) {
                int d = dx + dy - 2 * dz;
                if (d < 1) continue;
                double norm = std::pow(tree_pair_distance_p(dx, dy, dz, xs), 1.0 / xs.p);
                best = std::min(best, norm / d);
            }
    return best;
}

}  // namespace isocomp
