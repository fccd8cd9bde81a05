#include "isocomp/functions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "isocomp/walks.hpp"

namespace isocomp {

GroupFunction::GroupFunction(std::shared_ptr<const Ball> ball,
                             std::vector<std::pair<int32_t, double>> entries)
    : ball_(std::move(ball)), entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end());
    std::erase_if(entries_, [](const auto& e) { return e.second == 0.0; });
    for (size_t i = 0; i + 1 < entries_.size(); ++i)
        if (entries_[i].first == entries_[i + 1].first)
            throw UsageError("GroupFunction: duplicate support index");
    if (!entries_.empty() &&
        (entries_.front().first < 0 || entries_.back().first >= ball_->size()))
        throw UsageError("GroupFunction: support outside the ball");
}

double GroupFunction::at(int32_t index) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                               [](const auto& e, int32_t i) { return e.first < i; });
    return it != entries_.end() && it->first == index ? it->second : 0.0;
}

int GroupFunction::supportRadius() const {
    int r = 0;
    for (const auto& [i, v] : entries_) r = std::max(r, static_cast<int>(ball_->length(i)));
    return r;
}

GroupFunction GroupFunction::indicator(std::shared_ptr<const Ball> ball,
                                       const std::vector<int32_t>& indices) {
    std::vector<std::pair<int32_t, double>> e;
    e.reserve(indices.size());
    for (int32_t i : indices) e.emplace_back(i, 1.0);
    return GroupFunction(std::move(ball), std::move(e));
}

GroupFunction GroupFunction::ballIndicator(std::shared_ptr<const Ball> ball, int k) {
    std::vector<std::pair<int32_t, double>> e;
    int32_t n = static_cast<int32_t>(ball->volume(k));
    e.reserve(n);
    for (int32_t i = 0; i < n; ++i) e.emplace_back(i, 1.0);
    return GroupFunction(std::move(ball), std::move(e));
}

double lp_norm(const GroupFunction& phi, double p) {
    if (p < 1.0) throw UsageError("lp_norm: p must be >= 1");
    KahanSum s;
    for (const auto& [i, v] : phi.entries()) s.add(std::pow(std::fabs(v), p));
    return std::pow(s.value(), 1.0 / p);
}

double linf_norm(const GroupFunction& phi) {
    double m = 0;
    for (const auto& [i, v] : phi.entries()) m = std::max(m, std::fabs(v));
    return m;
}

namespace {

/// Gradient value at a single point x given phi (0 outside the ball).
/// phiAt(index or kOutside) must resolve values; x given by index.
double gradAtIndex(const GroupFunction& phi, int32_t x) {
    const Ball& ball = phi.ball();
    double fx = phi.at(x);
    double best = 0.0;
    for (size_t j = 1; j < ball.group().numGenerators(); ++j) {
        int32_t sx = ball.leftMul(x, static_cast<int>(j));
        double fsx = sx == Ball::kOutside ? 0.0 : phi.at(sx);
        best = std::max(best, std::fabs(fsx - fx));
    }
    return best;
}

}  // namespace

GradientResult gradient_sup(const GroupFunction& phi, BoundaryPolicy policy) {
    const Ball& ball = phi.ball();
    if (!ball.hasTables()) throw UsageError("gradient_sup: ball enumerated without tables");
    // candidate points: supp(phi) plus one left-S step
    std::vector<int32_t> candidates;
    bool touched = false;
    for (const auto& [i, v] : phi.entries()) {
        candidates.push_back(i);
        for (size_t j = 1; j < ball.group().numGenerators(); ++j) {
            int32_t si = ball.leftMul(i, static_cast<int>(j));
            if (si == Ball::kOutside)
                touched = true;  // a neighbor of the support left the ball
            else
                candidates.push_back(si);
        }
    }
    if (touched && policy == BoundaryPolicy::Strict)
        throw PrecisionError(
            "gradient_sup: support touches the ball boundary (pass Truncate to accept "
            "truncation)");
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    std::vector<std::pair<int32_t, double>> out;
    for (int32_t x : candidates) {
        double g = gradAtIndex(phi, x);
        if (g != 0.0) out.emplace_back(x, g);
    }
    return GradientResult{GroupFunction(phi.ballPtr(), std::move(out)), touched};
}

double gradient_sup_norm(const GroupFunction& phi, double p) {
    if (p < 1.0) throw UsageError("gradient_sup_norm: p must be >= 1");
    const Ball& ball = phi.ball();
    const MarkedGroup& G = ball.group();
    // In-ball part (never truncates: values of phi outside the ball are 0).
    GradientResult inBall = [&] {
        try {
            return gradient_sup(phi, BoundaryPolicy::Strict);
        } catch (const PrecisionError&) {
            return gradient_sup(phi, BoundaryPolicy::Truncate);
        }
    }();
    KahanSum s;
    for (const auto& [i, v] : inBall.grad.entries()) s.add(std::pow(v, p));
    if (inBall.touchedBoundary) {
        // ring outside the ball: points x = s^-1 h with h in supp(phi); there
        // phi(x) = 0 and |grad|(x) = max over neighbors sx of phi(sx).
        std::map<std::string, GroupElement> ring;
        for (const auto& [i, v] : phi.entries()) {
            (void)v;
            for (size_t j = 1; j < G.numGenerators(); ++j) {
                if (ball.leftMul(i, static_cast<int>(j)) != Ball::kOutside) continue;
                GroupElement x = G.multiply(G.generators()[j], ball.element(i));
                ring.emplace(G.encode(x), std::move(x));
            }
        }
        for (const auto& [enc, x] : ring) {
            (void)enc;
            double best = 0.0;
            for (size_t j = 1; j < G.numGenerators(); ++j) {
                int32_t sx = ball.find(G.multiply(G.generators()[j], x));
                if (sx != Ball::kOutside) best = std::max(best, std::fabs(phi.at(sx)));
            }
            s.add(std::pow(best, p));
        }
    }
    return std::pow(s.value(), 1.0 / p);
}

GroupFunction left_translate(const GroupElement& g, const GroupFunction& phi,
                             BoundaryPolicy policy) {
    const Ball& ball = phi.ball();
    std::vector<std::pair<int32_t, double>> out;
    out.reserve(phi.supportSize());
    for (const auto& [i, v] : phi.entries()) {
        int32_t gi = ball.findProduct(g, i);
        if (gi == Ball::kOutside) {
            if (policy == BoundaryPolicy::Strict)
                throw PrecisionError("left_translate: translated support leaves the ball");
            continue;
        }
        out.emplace_back(gi, v);
    }
    return GroupFunction(phi.ballPtr(), std::move(out));
}

GroupFunction right_translate(const GroupFunction& phi, const GroupElement& h,
                              BoundaryPolicy policy) {
    const Ball& ball = phi.ball();
    const MarkedGroup& G = ball.group();
    GroupElement hinv = G.inverse(h);
    std::vector<std::pair<int32_t, double>> out;
    out.reserve(phi.supportSize());
    for (const auto& [i, v] : phi.entries()) {
        // (phi o R_h)(x) = phi(x h) is supported on supp(phi) h^-1
        int32_t xi = ball.find(G.multiply(ball.element(i), hinv));
        if (xi == Ball::kOutside) {
            if (policy == BoundaryPolicy::Strict)
                throw PrecisionError("right_translate: translated support leaves the ball");
            continue;
        }
        out.emplace_back(xi, v);
    }
    return GroupFunction(phi.ballPtr(), std::move(out));
}

namespace {

double translateDistanceP(const GroupFunction& phi, const GroupElement& g, double p) {
    // ||phi - lambda(g) phi||_p^p, computed over supp(phi) union g supp(phi)
    const Ball& ball = phi.ball();
    const MarkedGroup& G = ball.group();
    GroupElement ginv = G.inverse(g);
    KahanSum s;
    for (const auto& [i, v] : phi.entries()) {
        // x in supp(phi): |phi(x) - phi(g^-1 x)|
        int32_t gi = ball.findProduct(ginv, i);
        double translated = gi == Ball::kOutside ? 0.0 : phi.at(gi);
        s.add(std::pow(std::fabs(v - translated), p));
        // x = g y in g supp(phi) \ supp(phi): |0 - phi(y)| there
        int32_t fwd = ball.findProduct(g, i);
        bool inSupport = fwd != Ball::kOutside && phi.at(fwd) != 0.0;
        if (!inSupport) s.add(std::pow(std::fabs(v), p));
    }
    return s.value();
}

}  // namespace

double variation(const GroupFunction& phi, double t, double p) {
    if (t < 0) throw UsageError("variation: t must be >= 0");
    if (p < 1) throw UsageError("variation: p must be >= 1");
    if (t == 0 || phi.empty()) return 0.0;
    const Ball& ball = phi.ball();
    int r = phi.supportRadius();
    double disjointValue = std::pow(2.0, 1.0 / p) * lp_norm(phi, p);
    int tCeil = static_cast<int>(std::ceil(t));
    if (tCeil > 2 * r) return disjointValue;
    if (2 * r > ball.radius())
        throw ResourceError("variation: ball radius " + std::to_string(ball.radius()) +
                            " < twice the support radius " + std::to_string(2 * r));
    double best = disjointValue;
    for (int32_t i = static_cast<int32_t>(ball.volume(tCeil - 1));
         i < static_cast<int32_t>(ball.volume(std::min(2 * r, ball.radius()))); ++i) {
        best = std::min(best, std::pow(translateDistanceP(phi, ball.element(i), p), 1.0 / p));
    }
    return best;
}

GroupFunction convolve(const WalkMeasure& nu, const GroupFunction& phi, BoundaryPolicy policy) {
    const Ball& ball = phi.ball();
    if (nu.ball.get() != &ball)
        throw UsageError("convolve: measure and function live on different balls");
    std::unordered_map<int32_t, double> acc;
    bool escaped = false;
    for (const auto& [gi, w] : nu.mass) {
        const GroupElement& g = ball.element(gi);
        for (const auto& [yi, v] : phi.entries()) {
            int32_t x = ball.findProduct(g, yi);
            if (x == Ball::kOutside) {
                escaped = true;
                continue;
            }
            acc[x] += w * v;
        }
    }
    if (escaped && policy == BoundaryPolicy::Strict)
        throw PrecisionError("convolve: supp(nu) supp(phi) escapes the ball");
    std::vector<std::pair<int32_t, double>> out(acc.begin(), acc.end());
    return GroupFunction(phi.ballPtr(), std::move(out));
}

std::string function_to_csv(const GroupFunction& phi) {
    std::ostringstream os;
    os << "normalform,value\n";
    os.precision(17);
    for (const auto& [i, v] : phi.entries())
        os << phi.ball().group().toString(phi.ball().element(i)) << "," << v << "\n";
    return os.str();
}

double dirichlet_energy2(const WalkMeasure& nu, const GroupFunction& phi) {
    const Ball& ball = phi.ball();
    const MarkedGroup& G = ball.group();
    GroupFunction nu2 = convolve(nu, GroupFunction(phi.ballPtr(), {nu.mass.begin(), nu.mass.end()}),
                                 BoundaryPolicy::Strict);
    KahanSum total;
    for (const auto& [si, w] : nu2.entries()) {
        const GroupElement s = ball.element(si);
        const GroupElement sinv = G.inverse(s);
        // sum over g in ball of |phi(sg) - phi(g)|^2
        KahanSum inner;
        for (int32_t g = 0; g < ball.size(); ++g) {
            int32_t sg = ball.findProduct(s, g);
            double a = sg == Ball::kOutside ? 0.0 : phi.at(sg);
            double b = phi.at(g);
            if (a != 0.0 || b != 0.0) inner.add((a - b) * (a - b));
        }
        // plus g outside the ball with sg = h in supp(phi): |phi(h)|^2 each
        for (const auto& [hi, v] : phi.entries()) {
            if (ball.findProduct(sinv, hi) == Ball::kOutside) inner.add(v * v);
        }
        total.add(w * inner.value());
    }
    return total.value();
}

}  // namespace isocomp
