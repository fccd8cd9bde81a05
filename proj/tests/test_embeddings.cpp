#include "doctest.h"
#include "isocomp/embeddings.hpp"

#include <cmath>
#include <map>
#include <vector>

using namespace isocomp;

namespace {

// ---------------------------------------------------------------------------
// Test-side oracle: materialize F(x) as an explicit sparse vector over the
// vertices of a tree and take all-pairs minima. Independent of the
// meet-depth reduction in the library.
// ---------------------------------------------------------------------------

struct ExplicitTree {
    std::vector<int32_t> parent;  // parent[0] = -1
    std::vector<int> depth;
};

ExplicitTree binaryTree(int J) {
    ExplicitTree t;
    t.parent.push_back(-1);
    t.depth.push_back(0);
    int levelStart = 0, levelSize = 1;
    for (int d = 1; d <= J; ++d) {
        int nextStart = static_cast<int>(t.parent.size());
        for (int v = levelStart; v < levelStart + levelSize; ++v) {
            for (int c = 0; c < 2; ++c) {
                t.parent.push_back(v);
                t.depth.push_back(d);
            }
        }
        levelStart = nextStart;
        levelSize *= 2;
    }
    return t;
}

/// F(x): coefficient xi_{i+2} on the vertex at distance i along the path
/// from x to the root, x itself included.
std::map<int, double> embed(const ExplicitTree& t, int x, const XiSequence& xs) {
    std::map<int, double> F;
    int v = x, i = 0;
    while (v >= 0) {
        F[v] = xs.at(i + 2);
        v = t.parent[v];
        ++i;
    }
    return F;
}

double pairNorm(const ExplicitTree& t, int x, int y, const XiSequence& xs) {
    auto Fx = embed(t, x, xs), Fy = embed(t, y, xs);
    std::map<int, double> diff = Fx;
    for (auto& [k, v] : Fy) diff[k] -= v;
    double s = 0;
    for (auto& [k, v] : diff) s += std::pow(std::fabs(v), xs.p);
    return std::pow(s, 1.0 / xs.p);
}

int treeDist(const ExplicitTree& t, int x, int y) {
    std::map<int, int> up;
    int v = x, d = 0;
    while (v >= 0) {
        up[v] = d++;
        v = t.parent[v];
    }
    v = y;
    d = 0;
    while (true) {
        auto it = up.find(v);
        if (it != up.end()) return d + it->second;
        v = t.parent[v];
        ++d;
    }
}

CompressionCurve bruteCurve(const ExplicitTree& t, const XiSequence& xs) {
    int n = static_cast<int>(t.parent.size());
    int maxD = 0;
    std::vector<std::pair<int, double>> samples;
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
            int d = treeDist(t, x, y);
            maxD = std::max(maxD, d);
            samples.emplace_back(d, pairNorm(t, x, y, xs));
        }
    CompressionCurve c;
    c.rho.assign(maxD, std::numeric_limits<double>::infinity());
    for (auto& [d, v] : samples) c.rho[d - 1] = std::min(c.rho[d - 1], v);
    for (int d = maxD - 1; d >= 1; --d) c.rho[d - 1] = std::min(c.rho[d - 1], c.rho[d]);
    // brute Lipschitz: max over edges
    c.lipschitz = 0;
    for (int v = 1; v < n; ++v)
        c.lipschitz = std::max(c.lipschitz, pairNorm(t, v, t.parent[v], xs));
    return c;
}

}  // namespace

TEST_CASE("build_xi: increments and asymptotics") {
    // f = sqrt(t), p = 2: dxi_j = j^(-1), xi_n ~ ln n
    auto xs = build_xi(CompressionModulus::power(0.5), 2.0, 4000);
    CHECK(xs.xi[0] == 0.0);
    CHECK(xs.xi[1] == 0.0);
    for (int j = 1; j < 50; ++j)
        CHECK(xs.xi[j + 1] - xs.xi[j] == doctest::Approx(1.0 / j).epsilon(1e-12));
    CHECK(xs.xi[4000] / std::log(4000.0) == doctest::Approx(1.0).epsilon(0.1));
    CHECK_FALSE(xs.cpWarning);

    auto bad = build_xi(CompressionModulus::power(1.0), 2.0, 10);
    CHECK(bad.cpWarning);  // warn, don't refuse

    auto zero = build_xi(CompressionModulus::parse("zero"), 2.0, 10);
    for (double v : zero.xi) CHECK(v == 0.0);
    CHECK_THROWS_AS(build_xi(CompressionModulus::power(0.5), 2.0, 1), UsageError);
}

TEST_CASE("sum of increment powers is controlled by the partial integral") {
    for (double a : {0.9, 0.7, 0.5}) {
        auto f = CompressionModulus::power(a);
        auto xs = build_xi(f, 2.0, 100000);
        KahanSum s;
        for (size_t j = 0; j + 1 < xs.xi.size(); ++j)
            s.add(std::pow(xs.xi[j + 1] - xs.xi[j], 2.0));
        CHECK(s.value() <= check_Cp(f, 2.0).partialIntegral + 1.0);
    }
}

TEST_CASE("meet-depth reduction equals brute force on T_6 exactly") {
    auto xs = build_xi(CompressionModulus::power(0.7), 2.0, 64);
    auto fast = tree_compression_curve_binary(6, xs);
    auto brute = bruteCurve(binaryTree(6), xs);
    REQUIRE(fast.tmax() == brute.tmax());
    for (int t = 1; t <= fast.tmax(); ++t)
        CHECK(fast.at(t) == doctest::Approx(brute.at(t)).epsilon(1e-13));
    CHECK(fast.lipschitz == doctest::Approx(brute.lipschitz).epsilon(1e-13));
}

TEST_CASE("general-tree path equals brute force on random trees up to 200 vertices") {
    Rng rng(77);
    auto xs = build_xi(CompressionModulus::power(0.6), 2.5, 512);
    for (int trial = 0; trial < 6; ++trial) {
        int n = 20 + static_cast<int>(rng.nextBelow(180));
        ExplicitTree t;
        t.parent.push_back(-1);
        t.depth.push_back(0);
        for (int v = 1; v < n; ++v) {
            // parent among the previous few vertices keeps depth moderate
            int lo = std::max(0, v - 8);
            int parent = lo + static_cast<int>(rng.nextBelow(static_cast<uint64_t>(v - lo)));
            t.parent.push_back(parent);
            t.depth.push_back(t.depth[parent] + 1);
        }
        auto fast = tree_compression_curve_general(t.parent, xs);
        auto brute = bruteCurve(t, xs);
        REQUIRE(fast.tmax() == brute.tmax());
        for (int d = 1; d <= fast.tmax(); ++d)
            CHECK(fast.at(d) == doctest::Approx(brute.at(d)).epsilon(1e-12));
    }
}

TEST_CASE("zero xi gives the zero curve") {
    auto zero = build_xi(CompressionModulus::parse("zero"), 2.0, 32);
    auto curve = tree_compression_curve_binary(5, zero);
    for (int t = 1; t <= curve.tmax(); ++t) CHECK(curve.at(t) == 0.0);
    CHECK(curve.lipschitz == 0.0);
}

TEST_CASE("the compression lemma with floor(n/2) holds for all n") {
    for (double p : {1.5, 2.0}) {
        auto xs = build_xi(CompressionModulus::power(0.7), p, 64);
        int J = 8;
        auto curve = tree_compression_curve_binary(J, xs);
        for (int nn = 1; nn <= 2 * J; ++nn) {
            KahanSum s;
            for (int j = 0; j <= nn / 2; ++j) s.add(std::pow(xs.at(j), p));
            CHECK(curve.at(nn) >= std::pow(s.value(), 1.0 / p) - 1e-12);
        }
    }
}

TEST_CASE("monotone coupling: smaller f gives smaller xi and rho") {
    auto x1 = build_xi(CompressionModulus::power(0.5), 2.0, 64);
    auto x2 = build_xi(CompressionModulus::power(0.7), 2.0, 64);
    for (size_t j = 0; j < x1.size(); ++j) CHECK(x1.at(j) <= x2.at(j) + 1e-15);
    auto c1 = tree_compression_curve_binary(7, x1);
    auto c2 = tree_compression_curve_binary(7, x2);
    for (int t = 1; t <= c1.tmax(); ++t) CHECK(c1.at(t) <= c2.at(t) + 1e-12);
}

TEST_CASE("curves validate: monotone and Lipschitz-bounded") {
    auto xs = build_xi(CompressionModulus::power(0.7), 2.0, 64);
    auto curve = tree_compression_curve_binary(10, xs);
    curve.validate();  // must not throw
    for (int t = 1; t < curve.tmax(); ++t) CHECK(curve.at(t) <= curve.at(t + 1) + 1e-15);
    for (int t = 1; t <= curve.tmax(); ++t) CHECK(curve.at(t) <= curve.lipschitz * t * (1 + 1e-9));
}

TEST_CASE("bourgain integral: identity curve gives log 2J") {
    for (int J : {4, 8, 12}) {
        CompressionCurve identity;
        identity.rho.resize(2 * J);
        for (int t = 1; t <= 2 * J; ++t) identity.rho[t - 1] = t;
        identity.lipschitz = 1.0;
        double I = bourgain_integral(identity, 2.0, J, 1.0);
        CHECK(I == doctest::Approx(std::log(2.0 * J)).epsilon(1e-6));
        CHECK(std::fabs(I - std::log(2.0 * J)) <= 0.02 * std::log(2.0 * J));
    }
    CompressionCurve c;
    c.rho = {1.0, 1.0};
    CHECK_THROWS_AS(bourgain_integral(c, 2.0, 1, 0.0), UsageError);
    CHECK_THROWS_AS(bourgain_integral(c, 1.0, 1, 1.0), UsageError);
}

TEST_CASE("bourgain integral of the spherical embedding stays bounded in J") {
    auto xs = build_xi(CompressionModulus::power(0.7), 2.0, 64);
    std::vector<double> vals;
    for (int J = 4; J <= 12; ++J) {
        auto curve = tree_compression_curve_binary(J, xs);
        vals.push_back(bourgain_integral(curve, 2.0, J, curve.lipschitz));
    }
    for (double v : vals) CHECK(v <= 1.3 * vals[4]);  // J = 8 entry
}

TEST_CASE("the obstruction corollary inequality holds for computed embeddings") {
    auto xs = build_xi(CompressionModulus::power(0.7), 2.0, 64);
    for (int J : {4, 6, 8, 10, 12}) {
        auto curve = tree_compression_curve_binary(J, xs);
        double I = bourgain_integral(curve, 2.0, J, curve.lipschitz);
        double minRatio = tree_min_ratio_binary(J, xs) / curve.lipschitz;
        CHECK(minRatio <= std::pow(I / std::log(static_cast<double>(J)), 0.5) + 1e-12);
    }
}

TEST_CASE("resource guards") {
    auto xs = build_xi(CompressionModulus::power(0.7), 2.0, 64);
    CHECK_THROWS_AS(tree_compression_curve_binary(21, xs), ResourceError);
    std::vector<int32_t> big(10001, 0);
    for (int v = 1; v <= 10000; ++v) big[v] = v - 1;
    big[0] = -1;
    CHECK_THROWS_AS(tree_compression_curve_general(big, xs), ResourceError);
    auto shortXi = build_xi(CompressionModulus::power(0.7), 2.0, 10);
    CHECK_THROWS_AS(tree_compression_curve_binary(15, shortXi), UsageError);  // xi too short
}
