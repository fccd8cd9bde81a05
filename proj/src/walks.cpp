#include "isocomp/walks.hpp"

#include <algorithm>
#include <cmath>

namespace isocomp {

WalkMeasure WalkMeasure::lazyUniform(std::shared_ptr<const Ball> ball) {
    const MarkedGroup& G = ball->group();
    size_t k = G.numGenerators() - 1;  // S minus the identity
    WalkMeasure nu;
    nu.ball = std::move(ball);
    nu.mass.emplace_back(0, 0.5);
    for (size_t j = 1; j <= k; ++j) {
        int32_t idx = nu.ball->find(G.generators()[j]);
        nu.mass.emplace_back(idx, 0.5 / static_cast<double>(k));
    }
    std::sort(nu.mass.begin(), nu.mass.end());
    nu.symmetric = true;
    nu.lazy = true;
    nu.validate();
    return nu;
}

WalkMeasure WalkMeasure::uniformOnGenerators(std::shared_ptr<const Ball> ball) {
    const MarkedGroup& G = ball->group();
    size_t k = G.numGenerators() - 1;
    WalkMeasure nu;
    nu.ball = std::move(ball);
    for (size_t j = 1; j <= k; ++j) {
        int32_t idx = nu.ball->find(G.generators()[j]);
        nu.mass.emplace_back(idx, 1.0 / static_cast<double>(k));
    }
    std::sort(nu.mass.begin(), nu.mass.end());
    nu.symmetric = true;
    nu.lazy = false;
    nu.validate();
    return nu;
}

double WalkMeasure::at(int32_t index) const {
    auto it = std::lower_bound(mass.begin(), mass.end(), index,
                               [](const auto& e, int32_t i) { return e.first < i; });
    return it != mass.end() && it->first == index ? it->second : 0.0;
}

void WalkMeasure::validate() const {
    KahanSum s;
    for (const auto& [i, w] : mass) {
        if (w <= 0) throw UsageError("WalkMeasure: nonpositive mass");
        s.add(w);
    }
    if (std::fabs(s.value() - 1.0) > 1e-12)
        throw UsageError("WalkMeasure: total mass differs from 1 by more than 1e-12");
    const MarkedGroup& G = ball->group();
    for (const auto& [i, w] : mass) {
        int32_t inv = ball->find(G.inverse(ball->element(i)));
        if (inv == Ball::kOutside || at(inv) != w)
            throw UsageError("WalkMeasure: not exactly symmetric");
    }
}

namespace {

struct DensePower {
    std::vector<double> values;  // indexed by ball element
    int supportRadiusBound;      // support is inside B(1, this)
};

int maxSupportLength(const WalkMeasure& nu) {
    int m = 0;
    for (const auto& [i, w] : nu.mass) m = std::max(m, static_cast<int>(nu.ball->length(i)));
    return m;
}

/// One convolution step: out(x) = sum_g nu(g) in(g^-1 x). Fast path uses the
/// left-multiplication table when every atom of nu is a generator.
void convolveStep(const WalkMeasure& nu, const std::vector<int>& genOfAtom,
                  const std::vector<double>& in, std::vector<double>& out) {
    const Ball& ball = *nu.ball;
    const MarkedGroup& G = ball.group();
    std::fill(out.begin(), out.end(), 0.0);
    bool fast = !genOfAtom.empty();
    for (size_t a = 0; a < nu.mass.size(); ++a) {
        const auto& [gi, w] = nu.mass[a];
        if (fast) {
            int jInv = G.inverseGenerator(genOfAtom[a]);
            for (int32_t x = 0; x < ball.size(); ++x) {
                int32_t y = ball.leftMul(x, jInv);
                if (y != Ball::kOutside && in[y] != 0.0) out[x] += w * in[y];
            }
        } else {
            const GroupElement g = ball.element(gi);
            for (int32_t y = 0; y < ball.size(); ++y) {
                if (in[y] == 0.0) continue;
                int32_t x = ball.findProduct(g, y);
                if (x != Ball::kOutside) out[x] += w * in[y];
            }
        }
    }
}

std::vector<int> atomGeneratorIndices(const WalkMeasure& nu) {
    const Ball& ball = *nu.ball;
    const MarkedGroup& G = ball.group();
    std::vector<int> genOf(nu.mass.size(), -1);
    for (size_t a = 0; a < nu.mass.size(); ++a) {
        for (size_t j = 0; j < G.numGenerators(); ++j) {
            if (ball.element(nu.mass[a].first) == G.generators()[j]) {
                genOf[a] = static_cast<int>(j);
                break;
            }
        }
        if (genOf[a] < 0) return {};  // not generator-supported: slow path
    }
    return genOf;
}

std::vector<double> densePower(const WalkMeasure& nu, int n) {
    const Ball& ball = *nu.ball;
    if (n < 0) throw UsageError("convolution_power: n must be >= 0");
    if (static_cast<int64_t>(maxSupportLength(nu)) * n > ball.radius())
        throw ResourceError("convolution_power: S^" + std::to_string(n) +
                            " exceeds the enumerated radius " + std::to_string(ball.radius()));
    std::vector<int> genOf = atomGeneratorIndices(nu);
    std::vector<double> cur(ball.size(), 0.0), next(ball.size(), 0.0);
    cur[0] = 1.0;
    for (int step = 0; step < n; ++step) {
        convolveStep(nu, genOf, cur, next);
        std::swap(cur, next);
    }
    KahanSum mass;
    for (double v : cur) mass.add(v);
    if (std::fabs(mass.value() - 1.0) > 1e-12)
        throw InvariantError("convolution_power: mass not conserved within 1e-12");
    return cur;
}

GroupFunction sparsify(std::shared_ptr<const Ball> ball, const std::vector<double>& dense) {
    std::vector<std::pair<int32_t, double>> entries;
    for (int32_t i = 0; i < static_cast<int32_t>(dense.size()); ++i)
        if (dense[i] != 0.0) entries.emplace_back(i, dense[i]);
    return GroupFunction(std::move(ball), std::move(entries));
}

}  // namespace

GroupFunction convolution_power(const WalkMeasure& nu, int n) {
    return sparsify(nu.ball, densePower(nu, n));
}

double return_probability(const WalkMeasure& nu, int n) { return densePower(nu, n)[0]; }

std::vector<double> walk_psi(const WalkMeasure& nu, int qmax) {
    const Ball& ball = *nu.ball;
    if (static_cast<int64_t>(maxSupportLength(nu)) * qmax > ball.radius())
        throw ResourceError("walk_psi: S^" + std::to_string(qmax) + " exceeds the ball");
    std::vector<int> genOf = atomGeneratorIndices(nu);
    std::vector<double> cur(ball.size(), 0.0), next(ball.size(), 0.0);
    cur[0] = 1.0;
    std::vector<double> psi;
    for (int q = 0; q <= qmax; ++q) {
        KahanSum s;
        for (double v : cur) s.add(v * v);
        psi.push_back(s.value());
        if (q == qmax) break;
        convolveStep(nu, genOf, cur, next);
        std::swap(cur, next);
    }
    return psi;
}

WalkCertificateResult walk_profile_certificate(const WalkMeasure& nu, int n) {
    if (!nu.lazy || !nu.symmetric)
        throw UsageError("walk_profile_certificate: nu must be lazy and symmetric");
    if (n < 1) throw UsageError("walk_profile_certificate: n must be >= 1");
    const Ball& ball = *nu.ball;
    if (2 * n > ball.radius())
        throw ResourceError("walk_profile_certificate: needs S^(2n) inside the ball");

    WalkCertificateResult res;
    res.psi = walk_psi(nu, 2 * n);
    // nabla_2 Rayleigh ratio of nu^(q) via the energy identity
    auto ratio = [&](int q) { return 2.0 * (res.psi[q] - res.psi[q + 1]) / res.psi[q]; };
    int qStar = n;
    for (int q = n; q <= 2 * n - 1; ++q)
        if (ratio(q) < ratio(qStar)) qStar = q;
    res.selectedQ = qStar;
    res.nabla2Ratio = ratio(qStar);
    res.pigeonholeBound = (2.0 / n) * std::log(res.psi[n] / res.psi[2 * n]);
    if (res.nabla2Ratio > res.pigeonholeBound * (1 + 1e-12))
        throw InvariantError("walk_profile_certificate: pigeonhole selection failed");

    // conversion constant: nu^(2)(s) >= cmin > 0 for every generator s (nu lazy)
    GroupFunction nu2 = convolution_power(nu, 2);
    const MarkedGroup& G = ball.group();
    double cmin = 1.0;
    for (size_t j = 1; j < G.numGenerators(); ++j) {
        int32_t idx = ball.find(G.generators()[j]);
        cmin = std::min(cmin, nu2.at(idx));
    }
    if (cmin <= 0) throw InvariantError("walk_profile_certificate: nu^(2) vanishes on S");
    res.conversionConstant = cmin;

    res.witness = convolution_power(nu, qStar);
    double num = lp_norm(res.witness, 2.0);
    double den = gradient_sup_norm(res.witness, 2.0);
    res.certRatio = den == 0.0 ? 0.0 : num / den;
    // guaranteed: ||grad phi||^2 <= (1/cmin) ||(grad phi)_2||^2
    double guaranteed = std::sqrt(cmin / res.nabla2Ratio);
    if (res.certRatio < guaranteed * (1 - 1e-9))
        throw InvariantError("walk_profile_certificate: conversion bound violated");
    return res;
}

double simulate_return_probability(const WalkMeasure& nu, int n, int64_t trials, uint64_t seed) {
    const Ball& ball = *nu.ball;
    std::vector<int> genOf = atomGeneratorIndices(nu);
    if (genOf.empty())
        throw UsageError("simulate_return_probability: measure must be generator-supported");
    if (maxSupportLength(nu) * n > ball.radius())
        throw ResourceError("simulate_return_probability: walk can leave the ball");
    std::vector<double> cum;
    double acc = 0;
    for (const auto& [i, w] : nu.mass) {
        acc += w;
        cum.push_back(acc);
    }
    Rng rng(seed);
    int64_t returns = 0;
    for (int64_t t = 0; t < trials; ++t) {
        int32_t x = 0;
        for (int step = 0; step < n; ++step) {
            double u = rng.nextDouble();
            size_t a = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
            if (a >= cum.size()) a = cum.size() - 1;
            x = ball.leftMul(x, genOf[a]);
        }
        if (x == 0) ++returns;
    }
    return static_cast<double>(returns) / static_cast<double>(trials);
}

}  // namespace isocomp
