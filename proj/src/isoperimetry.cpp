#include "isocomp/isoperimetry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>
#include <map>
#include <set>
#include <sstream>

namespace isocomp {

namespace {

std::vector<char> membershipMask(const Ball& ball, const std::vector<int32_t>& set) {
    std::vector<char> mask(ball.size(), 0);
    for (int32_t i : set) {
        if (i < 0 || i >= ball.size()) throw UsageError("index set outside the ball");
        mask[i] = 1;
    }
    return mask;
}

/// L_j = S^j H as masks, j = 0..alpha; ResourceError if the expansion leaves
/// the enumerated ball.
std::vector<std::vector<int32_t>> leftExpansions(const FolnerPair& pair, int upTo) {
    const Ball& ball = *pair.ball;
    size_t nGen = ball.group().numGenerators();
    std::vector<char> in = membershipMask(ball, pair.H);
    std::vector<int32_t> cur = pair.H;
    std::sort(cur.begin(), cur.end());
    std::vector<std::vector<int32_t>> levels{cur};
    for (int j = 1; j <= upTo; ++j) {
        std::vector<int32_t> next = levels.back();
        for (int32_t x : levels.back()) {
            for (size_t g = 1; g < nGen; ++g) {
                int32_t y = ball.leftMul(x, static_cast<int>(g));
                if (y == Ball::kOutside)
                    throw ResourceError("S^" + std::to_string(j) +
                                        " H leaves the enumerated ball");
                if (!in[y]) {
                    in[y] = 1;
                    next.push_back(y);
                }
            }
        }
        std::sort(next.begin(), next.end());
        levels.push_back(std::move(next));
    }
    return levels;
}

}  // namespace

FolnerReport verify_folner_pair(const FolnerPair& pair) {
    const Ball& ball = *pair.ball;
    if (pair.H.empty() || pair.Hp.empty()) throw UsageError("Folner pair sets must be nonempty");
    std::vector<char> hpMask = membershipMask(ball, pair.Hp);
    for (int32_t i : pair.H)
        if (!hpMask[i]) throw UsageError("H must be a subset of H'");

    FolnerReport rep;
    auto levels = leftExpansions(pair, pair.alpha);
    rep.cond1 = std::all_of(levels.back().begin(), levels.back().end(),
                            [&](int32_t x) { return hpMask[x] != 0; });

    // right form H S^alpha (logged alongside; the definition and the section-5
    // proof use opposite sides)
    const MarkedGroup& G = ball.group();
    rep.cond1Right = true;
    int64_t volAlpha = pair.alpha <= ball.radius() ? ball.volume(pair.alpha) : -1;
    if (volAlpha < 0) throw ResourceError("S^alpha exceeds the enumerated ball");
    for (int32_t h : pair.H) {
        for (int32_t w = 0; w < volAlpha && rep.cond1Right; ++w) {
            int32_t y = ball.find(G.multiply(ball.element(h), ball.element(w)));
            if (y == Ball::kOutside || !hpMask[y]) rep.cond1Right = false;
        }
        if (!rep.cond1Right) break;
    }

    rep.C2 = static_cast<double>(pair.Hp.size()) / static_cast<double>(pair.H.size());
    int maxLen = 0;
    for (int32_t i : pair.Hp) maxLen = std::max(maxLen, static_cast<int>(ball.length(i)));
    rep.C3 = pair.n > 0 ? static_cast<double>(maxLen) / pair.n : 0.0;
    return rep;
}

double ProfileCertificate::recompute() const {
    if (witness.empty()) return 0.0;
    double num = lp_norm(witness, p);
    double den = gradient_sup_norm(witness, p);
    return den == 0.0 ? 0.0 : num / den;
}

void ProfileCertificate::verifySound() const {
    double r = recompute();
    double tol = 1e-10 * std::max(1.0, std::fabs(ratio));
    if (std::fabs(r - ratio) > tol)
        throw InvariantError("ProfileCertificate: stored ratio " + std::to_string(ratio) +
                             " does not recompute (" + std::to_string(r) + ")");
    if (!witness.empty() && witness.supportRadius() > t)
        throw InvariantError("ProfileCertificate: witness support exceeds the stated ball");
}

ProfileCertificate pair_test_function(const FolnerPair& pair, double p) {
    if (p < 1) throw UsageError("pair_test_function: p must be >= 1");
    const Ball& ball = *pair.ball;
    size_t nGen = ball.group().numGenerators();
    std::vector<char> hpMask = membershipMask(ball, pair.Hp);

    // phi(g) = min{k : g in S^k (H')^c} = graph distance to the complement of
    // H' in the left Cayley graph; everything outside the enumerated ball is
    // complement, reachable through table sentinels, so the BFS is exact.
    std::vector<int32_t> dist(ball.size(), -1);
    std::deque<int32_t> frontier, nextFrontier;
    for (int32_t x = 0; x < ball.size(); ++x)
        if (!hpMask[x]) {
            dist[x] = 0;
            frontier.push_back(x);
        }
    std::deque<int32_t> sentinelSeeds;
    for (int32_t x = 0; x < ball.size(); ++x) {
        if (!hpMask[x]) continue;
        for (size_t g = 1; g < nGen; ++g)
            if (ball.leftMul(x, static_cast<int>(g)) == Ball::kOutside) {
                sentinelSeeds.push_back(x);
                break;
            }
    }
    int level = 0;
    while (!frontier.empty() || (level == 0 && !sentinelSeeds.empty())) {
        for (int32_t x : frontier) {
            for (size_t g = 1; g < nGen; ++g) {
                int32_t y = ball.leftMul(x, static_cast<int>(g));
                if (y != Ball::kOutside && dist[y] < 0) {
                    dist[y] = level + 1;
                    nextFrontier.push_back(y);
                }
            }
        }
        if (level == 0)
            for (int32_t x : sentinelSeeds)
                if (dist[x] < 0) {
                    dist[x] = 1;
                    nextFrontier.push_back(x);
                }
        frontier = std::move(nextFrontier);
        nextFrontier.clear();
        ++level;
    }

    std::vector<std::pair<int32_t, double>> entries;
    int maxLen = 0;
    for (int32_t x : pair.Hp) {
        if (dist[x] > 0) entries.emplace_back(x, static_cast<double>(dist[x]));
        maxLen = std::max(maxLen, static_cast<int>(ball.length(x)));
    }
    ProfileCertificate cert;
    cert.t = maxLen;
    cert.p = p;
    cert.witness = GroupFunction(pair.ball, std::move(entries));
    if (cert.witness.empty()) {
        cert.degenerate = true;
        cert.ratio = 0.0;
        return cert;
    }
    double den = gradient_sup_norm(cert.witness, p);
    cert.degenerate = den == 0.0;
    cert.ratio = cert.degenerate ? 0.0 : lp_norm(cert.witness, p) / den;
    cert.verifySound();
    return cert;
}

FolnerSet folner_from_pair(const FolnerPair& pair) {
    if (pair.alpha < 1) throw UsageError("folner_from_pair: alpha must be >= 1");
    auto levels = leftExpansions(pair, pair.alpha);
    FolnerSet best;
    double bestRatio = -1;
    for (int j = 0; j + 1 <= pair.alpha; ++j) {
        double ratio = static_cast<double>(levels[j + 1].size() - levels[j].size()) /
                       static_cast<double>(levels[j].size());
        if (bestRatio < 0 || ratio < bestRatio) {
            bestRatio = ratio;
            best.j = j;
        }
    }
    best.boundaryRatio = bestRatio;
    best.K = levels[best.j];
    return best;
}

GrowthCertificate profile_growth_certificate(std::shared_ptr<const Ball> ball, int n, double p) {
    if (p < 1) throw UsageError("profile_growth_certificate: p must be >= 1");
    if (n < 1 || n > ball->radius())
        throw ResourceError("profile_growth_certificate: n exceeds the enumerated ball");
    GrowthCertificate out;
    out.k.assign(n + 1, 0);
    for (int q = 0; q <= n; ++q) {
        int k = 0;
        while (k + 1 <= q && 2 * ball->volume(q - (k + 1)) >= ball->volume(q)) ++k;
        out.k[q] = k;
    }
    out.j = 0;
    out.q = 0;
    for (int q = 0; q <= n; ++q)
        if (out.k[q] >= out.j) {  // ties resolved to the largest q
            out.j = out.k[q];
            out.q = q;
        }
    if (out.q == 0) out.q = n;

    // phi_n = sum_{k=1}^{q-1} 1_{B(1,k)}  i.e. phi(x) = q - max(|x|,1) clipped at 0
    std::vector<std::pair<int32_t, double>> entries;
    for (int32_t i = 0; i < static_cast<int32_t>(ball->volume(std::max(out.q - 1, 0))); ++i) {
        int v = out.q - std::max<int>(ball->length(i), 1);
        if (v > 0) entries.emplace_back(i, static_cast<double>(v));
    }
    ProfileCertificate cert;
    cert.t = std::max(out.q - 1, 0);
    cert.p = p;
    cert.witness = GroupFunction(ball, std::move(entries));
    if (cert.witness.empty()) {
        cert.degenerate = true;
    } else {
        double den = gradient_sup_norm(cert.witness, p);
        cert.degenerate = den == 0.0;
        cert.ratio = cert.degenerate ? 0.0 : lp_norm(cert.witness, p) / den;
        cert.verifySound();
    }
    out.cert = std::move(cert);
    return out;
}

namespace {

struct AscentResult {
    double ratio = 0.0;
    std::vector<double> phi;
};

/// One deterministic ascent run over nonnegative phi supported in B(1,t).
AscentResult runAscent(const Ball& ball, int t, double p, int iterations,
                       const std::vector<double>& start) {
    int64_t nSup = ball.volume(t);
    int64_t nGrad = ball.volume(std::min(t + 1, ball.radius()));
    size_t nGen = ball.group().numGenerators();
    std::vector<double> phi = start;
    std::vector<double> dN(nSup), dG(nSup);

    auto phiAt = [&](int32_t idx) -> double {
        return idx != Ball::kOutside && idx < nSup ? phi[idx] : 0.0;
    };

    auto evaluate = [&](bool wantGradient) -> double {
        KahanSum np;
        for (int64_t i = 0; i < nSup; ++i)
            if (phi[i] != 0.0) np.add(std::pow(phi[i], p));
        if (wantGradient) std::fill(dN.begin(), dN.end(), 0.0);
        KahanSum gp;
        for (int32_t x = 0; x < nGrad; ++x) {
            double fx = x < nSup ? phi[x] : 0.0;
            double best = 0.0;
            int bestGen = -1;
            for (size_t j = 1; j < nGen; ++j) {
                int32_t sx = ball.leftMul(x, static_cast<int>(j));
                double d = std::fabs(phiAt(sx) - fx);
                if (d > best) {
                    best = d;
                    bestGen = static_cast<int>(j);
                }
            }
            if (best == 0.0) continue;
            gp.add(std::pow(best, p));
            if (wantGradient && bestGen >= 0) {
                int32_t sx = ball.leftMul(x, bestGen);
                double sgn = phiAt(sx) - fx > 0 ? 1.0 : -1.0;
                double w = std::pow(best, p - 1.0);
                if (sx != Ball::kOutside && sx < nSup) dG[sx] += sgn * w;
                if (x < nSup) dG[x] -= sgn * w;
            }
        }
        double normP = np.value(), gradP = gp.value();
        if (normP == 0.0 || gradP == 0.0) return 0.0;
        if (wantGradient) {
            for (int64_t i = 0; i < nSup; ++i) {
                double dlogN = phi[i] > 0 ? std::pow(phi[i], p - 1.0) / normP : 0.0;
                dN[i] = dlogN - dG[i] / gradP;
            }
        }
        return std::pow(normP / gradP, 1.0 / p);
    };

    AscentResult best;
    best.phi = phi;
    best.ratio = evaluate(false);
    for (int it = 1; it <= iterations; ++it) {
        std::fill(dG.begin(), dG.end(), 0.0);
        double ratio = evaluate(true);
        if (ratio > best.ratio) {
            best.ratio = ratio;
            best.phi = phi;
        }
        // normalized subgradient step with 1/sqrt(iter) decay
        double norm2 = 0;
        for (int64_t i = 0; i < nSup; ++i) norm2 += dN[i] * dN[i];
        if (norm2 == 0) break;
        double scale = 0.5 / (std::sqrt(static_cast<double>(it)) * std::sqrt(norm2));
        double maxv = 0;
        for (int64_t i = 0; i < nSup; ++i) {
            phi[i] = std::max(0.0, phi[i] + scale * dN[i]);
            maxv = std::max(maxv, phi[i]);
        }
        if (maxv == 0.0) break;
        for (int64_t i = 0; i < nSup; ++i) phi[i] /= maxv;
    }
    double final = evaluate(false);
    if (final > best.ratio) {
        best.ratio = final;
        best.phi = phi;
    }
    return best;
}

}  // namespace

ProfileCertificate profile_heuristic_max(std::shared_ptr<const Ball> ball, int t, double p,
                                         int restarts, uint64_t seed, int iterations,
                                         int threads) {
    if (p < 1) throw UsageError("profile_heuristic_max: p must be >= 1");
    if (t < 0 || t > ball->radius() - 1)
        throw UsageError("profile_heuristic_max: need 0 <= t <= radius-1");
    if (restarts < 1) throw UsageError("profile_heuristic_max: restarts must be >= 1");
    int64_t nSup = ball->volume(t);

    auto makeStart = [&](int r) {
        std::vector<double> phi(nSup, 0.0);
        if (r == 0) {
            // cone warm start
            for (int64_t i = 0; i < nSup; ++i)
                phi[i] = static_cast<double>(t + 1 - std::max<int>(ball->length(i), 1));
        } else if (r == 1) {
            std::fill(phi.begin(), phi.end(), 1.0);
        } else {
            Rng rng(seed * 0x9e3779b97f4a7c15ull + static_cast<uint64_t>(r));
            for (auto& v : phi) v = rng.nextDouble();
        }
        return phi;
    };

    std::vector<AscentResult> results(restarts);
    if (threads > 1) {
        std::vector<std::future<AscentResult>> futs;
        for (int r = 0; r < restarts; ++r)
            futs.push_back(std::async(std::launch::async, [&, r] {
                return runAscent(*ball, t, p, iterations, makeStart(r));
            }));
        for (int r = 0; r < restarts; ++r) results[r] = futs[r].get();
    } else {
        for (int r = 0; r < restarts; ++r)
            results[r] = runAscent(*ball, t, p, iterations, makeStart(r));
    }
    int bestR = 0;
    for (int r = 1; r < restarts; ++r)
        if (results[r].ratio > results[bestR].ratio) bestR = r;

    std::vector<std::pair<int32_t, double>> entries;
    for (int64_t i = 0; i < nSup; ++i)
        if (results[bestR].phi[i] != 0.0)
            entries.emplace_back(static_cast<int32_t>(i), results[bestR].phi[i]);
    ProfileCertificate cert;
    cert.t = t;
    cert.p = p;
    cert.witness = GroupFunction(ball, std::move(entries));
    if (cert.witness.empty()) {
        cert.degenerate = true;
        return cert;
    }
    double den = gradient_sup_norm(cert.witness, p);
    cert.degenerate = den == 0.0;
    cert.ratio = cert.degenerate ? 0.0 : lp_norm(cert.witness, p) / den;
    cert.verifySound();
    return cert;
}

// ---------------------------------------------------------------------------
// Lamplighter pairs in product form
// ---------------------------------------------------------------------------

namespace {

int64_t tourCover(int64_t a, int64_t b, int64_t k) {
    return std::min(2 * a + b + std::llabs(b - k), 2 * b + a + std::llabs(a + k));
}

double powInt(double base, int exp) {
    double r = 1.0;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

}  // namespace

LamplighterPairReport verify_lamplighter_pair(int m, int n) {
    if (m < 2) throw UsageError("verify_lamplighter_pair: m >= 2");
    if (n < 1) throw UsageError("verify_lamplighter_pair: n >= 1");
    LamplighterPairReport rep;
    rep.m = m;
    rep.n = n;

    // cond1: for every w = (shift, g) in S^n one has |shift| <= n and
    // supp(g) in [-n, n]; then w (k, u) = (shift+k, tau_k g + u) with
    // |shift+k| <= 2n and supp(tau_k g) = supp(g) - k in [-2n, 2n] for all
    // |k| <= n, so w H_n lands inside H'_n = I_{2n} x F^[-2n,2n] exactly.
    auto group = std::make_shared<const MarkedGroup>(MarkedGroup::wreathFinite(m));
    auto ball = enumerate_ball(group, n);
    rep.cond1 = true;
    for (int32_t i = 0; i < ball->size() && rep.cond1; ++i) {
        const auto& w = ball->element(i).wreath();
        if (std::llabs(w.shift) > n) rep.cond1 = false;
        for (const auto& [site, value] : w.lamps) {
            (void)value;
            if (site < -n || site > n) rep.cond1 = false;
        }
    }

    double lampConfigs = powInt(m, 4 * n + 1);
    rep.sizeH = (2.0 * n + 1) * lampConfigs;
    rep.sizeHp = (4.0 * n + 1) * lampConfigs;
    rep.C2 = (4.0 * n + 1) / (2.0 * n + 1);

    int64_t maxLampCost = m / 2;  // the costliest single lamp value
    rep.maxLenHp = 0;
    for (int64_t k = -2 * n; k <= 2 * n; ++k) {
        // lamp window is cursor-relative: absolute positions [k-2n, k+2n]
        int64_t a = std::max<int64_t>(0, 2 * n - k);
        int64_t b = std::max<int64_t>(0, k + 2 * n);
        rep.maxLenHp = std::max(rep.maxLenHp, tourCover(a, b, k) + (4 * n + 1) * maxLampCost);
    }
    rep.C3 = static_cast<double>(rep.maxLenHp) / n;
    return rep;
}

LamplighterCertificate lamplighter_pair_certificate(int m, int n, double p) {
    if (p < 1) throw UsageError("lamplighter_pair_certificate: p must be >= 1");
    LamplighterCertificate cert;
    cert.m = m;
    cert.n = n;
    cert.p = p;
    cert.tSupport = static_cast<int>(verify_lamplighter_pair(m, n).maxLenHp);
    // phi(k, u) = 2n+1-|k| on H'_n: lamp moves stay inside H'_n, so the
    // distance to the complement is the cursor's distance out of I_{2n}.
    double lampConfigs = powInt(m, 4 * n + 1);
    KahanSum phiP;
    for (int k = -2 * n; k <= 2 * n; ++k)
        phiP.add(std::pow(static_cast<double>(2 * n + 1 - std::abs(k)), p) * lampConfigs);
    cert.normPhiP = phiP.value();
    cert.normGradP = (4.0 * n + 3) * lampConfigs;  // |grad phi| = 1 on I_{2n+1} x U_n
    cert.ratio = std::pow(cert.normPhiP / cert.normGradP, 1.0 / p);
    return cert;
}

double LamplighterCertificate::recomputeBySlices() const {
    // per-cursor-slice accumulation in the opposite order, lamp factor by
    // repeated multiplication
    double lampConfigs = 1.0;
    for (int i = 0; i < 4 * n + 1; ++i) lampConfigs *= m;
    double num = 0.0;
    for (int k = 2 * n; k >= -2 * n; --k) {
        double h = 2 * n + 1 - std::abs(k);
        double term = lampConfigs;
        for (int e = 0; e < static_cast<int>(p); ++e) term *= h;
        if (p != std::floor(p)) term = lampConfigs * std::pow(h, p);
        num += term;
    }
    double den = (4.0 * n + 3) * lampConfigs;
    return std::pow(num / den, 1.0 / p);
}

LamplighterFolnerSet lamplighter_folner_from_pair(int m, int n) {
    if (n < 1) throw UsageError("lamplighter_folner_from_pair: n >= 1");
    auto group = std::make_shared<const MarkedGroup>(MarkedGroup::wreathFinite(m));
    double lampConfigs = powInt(m, 4 * n + 1);

    // |S^j H_n| = m^(4n+1) * sum over final cursors c of the number of
    // distinct outside-window lamp patterns tau_{c-shift} g, g from B(1,j).
    auto measure = [&](int j) {
        auto ball = enumerate_ball(group, j);
        int64_t patterns = 0;
        for (int c = -(n + j); c <= n + j; ++c) {
            std::set<std::vector<std::pair<int32_t, int32_t>>> seen;
            for (int32_t i = 0; i < ball->size(); ++i) {
                const auto& w = ball->element(i).wreath();
                int64_t k = c - w.shift;
                if (std::llabs(k) > n) continue;
                std::vector<std::pair<int32_t, int32_t>> pattern;
                for (const auto& [site, value] : w.lamps) {
                    int64_t s = site - k;  // tau_k g occupies supp(g) - k
                    if (s < -2 * n || s > 2 * n)
                        pattern.emplace_back(static_cast<int32_t>(s), value);
                }
                seen.insert(std::move(pattern));
            }
            patterns += static_cast<int64_t>(seen.size());
        }
        return static_cast<double>(patterns) * lampConfigs;
    };

    std::vector<double> mu(n + 1);
    for (int j = 0; j <= n; ++j) mu[j] = measure(j);
    LamplighterFolnerSet best;
    double bestRatio = -1;
    for (int j = 0; j <= n - 1; ++j) {
        double ratio = (mu[j + 1] - mu[j]) / mu[j];
        if (bestRatio < 0 || ratio < bestRatio) {
            bestRatio = ratio;
            best.j = j;
            best.muSjH = mu[j];
            best.muSj1H = mu[j + 1];
        }
    }
    best.boundaryRatio = bestRatio;
    return best;
}

FolnerPair materialize_lamplighter_pair(std::shared_ptr<const Ball> ball, int n) {
    const MarkedGroup& G = ball->group();
    if (G.family() != Family::WreathFiniteOverZ)
        throw UsageError("materialize_lamplighter_pair: ball must be over C_m wr Z");
    int m = G.param();
    FolnerPair pair;
    pair.n = n;
    pair.alpha = n;
    pair.ball = ball;
    for (int32_t i = 0; i < ball->size(); ++i) {
        const auto& w = ball->element(i).wreath();
        bool lampsOk = true;
        for (const auto& [site, value] : w.lamps) {
            (void)value;
            if (site < -2 * n || site > 2 * n) lampsOk = false;
        }
        if (!lampsOk) continue;
        if (std::llabs(w.shift) <= 2 * n) pair.Hp.push_back(i);
        if (std::llabs(w.shift) <= n) pair.H.push_back(i);
    }
    double lampConfigs = powInt(m, 4 * n + 1);
    if (static_cast<double>(pair.H.size()) != (2.0 * n + 1) * lampConfigs ||
        static_cast<double>(pair.Hp.size()) != (4.0 * n + 1) * lampConfigs)
        throw ResourceError("materialize_lamplighter_pair: ball too small to hold the pair");
    return pair;
}

}  // namespace isocomp
