#pragma once

#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "isocomp/embeddings.hpp"
#include "isocomp/functions.hpp"
#include "isocomp/groups.hpp"
#include "isocomp/moduli.hpp"

namespace isocomp {

/// Sparse vector in a coordinate space keyed by 64-bit tags (lamp sites,
/// ball indices, or block-tagged coordinates of a direct sum). Sorted keys.
using SparseVec = std::vector<std::pair<uint64_t, double>>;

double sparse_norm(const SparseVec& v, double p);
/// a*x + b*y, merged by key, zeros dropped.
SparseVec sparse_combine(double a, const SparseVec& x, double b, const SparseVec& y);

/// Evaluable 1-cocycle b : G -> l^p with b(gh) = pi(g) b(h) + b(g) for the
/// evident isometric action pi.
class Cocycle {
public:
    virtual ~Cocycle() = default;
    virtual const MarkedGroup& group() const = 0;
    virtual void evaluate(const GroupElement& g, SparseVec& out) const = 0;
    virtual void applyPi(const GroupElement& g, SparseVec& vec) const = 0;
    /// ||b(g)||_p^p; overridable for memoized variants.
    virtual double normP(const GroupElement& g, double p) const;

    SparseVec evaluate(const GroupElement& g) const;
    double norm(const GroupElement& g, double p) const;
    double maxGeneratorNormP(double p) const;  // max_s ||b(s)||_p^p
};

/// b(k, u) = tau_{-k} u for Z wr Z -> l^p(Z); pi = shift through the Z
/// quotient. ||b(g)||_p = ||u||_p.
class LampConfigCocycle : public Cocycle {
public:
    using Cocycle::evaluate;
    explicit LampConfigCocycle(std::shared_ptr<const MarkedGroup> zwrz);
    const MarkedGroup& group() const override { return *group_; }
    void evaluate(const GroupElement& g, SparseVec& out) const override;
    void applyPi(const GroupElement& g, SparseVec& vec) const override;
    double normP(const GroupElement& g, double p) const override;

private:
    std::shared_ptr<const MarkedGroup> group_;
};

/// b(g) = phi - lambda(g) phi with pi = lambda; coordinates are ball indices.
class VariationalCocycle : public Cocycle {
public:
    using Cocycle::evaluate;
    explicit VariationalCocycle(GroupFunction phi);
    const MarkedGroup& group() const override { return phi_.ball().group(); }
    void evaluate(const GroupElement& g, SparseVec& out) const override;
    void applyPi(const GroupElement& g, SparseVec& vec) const override;
    const GroupFunction& phi() const { return phi_; }

private:
    GroupFunction phi_;
    SparseVec phiVec_;
};

/// b(g) = inner(theta(g)) for the mod-2 projection theta : ZwrZ -> C2wrZ.
/// Norms are memoized by the projected element (theta collapses the ball).
class ThetaPullbackCocycle : public Cocycle {
public:
    using Cocycle::evaluate;
    ThetaPullbackCocycle(std::shared_ptr<const MarkedGroup> zwrz,
                         std::shared_ptr<const Cocycle> inner);
    const MarkedGroup& group() const override { return *group_; }
    void evaluate(const GroupElement& g, SparseVec& out) const override;
    void applyPi(const GroupElement& g, SparseVec& vec) const override;
    double normP(const GroupElement& g, double p) const override;

private:
    std::shared_ptr<const MarkedGroup> group_;
    std::shared_ptr<const Cocycle> inner_;
    mutable std::mutex cacheMutex_;
    mutable double cachedP_ = -1;
    mutable std::unordered_map<std::string, double> normCache_;
};

/// Block-disjoint weighted direct sum: coordinates tagged by block index.
class ScaledSumCocycle : public Cocycle {
public:
    using Cocycle::evaluate;
    explicit ScaledSumCocycle(std::vector<std::pair<double, std::shared_ptr<const Cocycle>>> blocks);
    const MarkedGroup& group() const override { return blocks_.front().second->group(); }
    void evaluate(const GroupElement& g, SparseVec& out) const override;
    void applyPi(const GroupElement& g, SparseVec& vec) const override;
    double normP(const GroupElement& g, double p) const override;
    const std::vector<std::pair<double, std::shared_ptr<const Cocycle>>>& blocks() const {
        return blocks_;
    }

private:
    std::vector<std::pair<double, std::shared_ptr<const Cocycle>>> blocks_;
};

/// Relative error of the cocycle identity b(gh) = pi(g) b(h) + b(g).
double cocycle_identity_error(const Cocycle& b, const GroupElement& g, const GroupElement& h,
                              double p);

/// Exact rho_b(t) = inf over enumerated |g| >= t of ||b(g)||_p for integer
/// t in [1, radius], by one pass grouping elements by word length. The
/// curve's Lipschitz field carries max_s ||b(s)||_p (the cocycle bound
/// rho(t) <= t max_s ||b(s)||_p is validated).
CompressionCurve cocycle_compression(const Cocycle& b, const Ball& ball, double p);

struct AssembledCocycle {
    std::shared_ptr<const ScaledSumCocycle> cocycle;
    std::vector<double> weights;      // f(2^k) / M(2^(k+1))
    double generatorNormSumP = 0.0;   // sum_k max_s ||btilde_k(s)||_p^p
};

/// Dyadic direct-sum assembly: btilde_k = (f(2^k)/M(2^(k+1))) b_k for k < K,
/// validated against rho_k(2^(k+1)) >= M(2^(k+1))/2. The generator norms obey
/// sum_k ||btilde_k(s)||_p^p <= 2 * integral of (f/M)^p dt/t over [1, 2^K].
AssembledCocycle assemble_dyadic(
    const std::vector<std::pair<std::shared_ptr<const Cocycle>, CompressionCurve>>& blocks,
    const CompressionModulus& f, const CompressionCurve& M, int K, double p);

struct ZwrZReport {
    double p = 2.0;
    double exponent = 0.0;        // p/(2p-1)
    std::vector<double> sphereInf;  // inf over |g| = t of m(g), t = 1..radius
    std::vector<double> tailInf;    // inf over |g| >= t
    std::vector<double> surrogateTailInf;  // same for max{L + |supp u|, ||u||_p}
    double fittedExponent = 0.0;  // least-squares slope of log tailInf vs log t
    double c = 0.0;               // min over g != e of m(g) / |g|^(p/(2p-1))
    std::string worstElement;
    int64_t case1Violations = 0;  // L > |g|/2 but |theta(g)| < |g|/2
    int64_t case2Violations = 0;  // ||u||_1 >= |g|/2 but m(g) < (|g|/2)^(p/(2p-1))
};

/// m(g) = max{ |theta(g)|_{C2 wr Z}, ||b(g)||_p } for the lamp cocycle,
/// per-sphere infima and the certified pointwise constant, plus a pointwise
/// audit of the two-case tour/Hoelder argument.
ZwrZReport zwrz_lower_bound(const Ball& ball, double p);

struct SchoenbergReport {
    double minEigenvalue = 0.0;
    double normK = 0.0;  // spectral norm of the kernel matrix
};

/// Gram matrix K_xy = exp(-||b(x^-1 y)||_2^2 / t^2) on the sample; by
/// Schoenberg's theorem it is positive semidefinite, so the minimum
/// eigenvalue must be >= -1e-8 ||K|| up to roundoff. p = 2 only.
SchoenbergReport schoenberg_psd_check(const Cocycle& b, const std::vector<GroupElement>& sample,
                                      double t, double p);

/// Deterministic sample of `count` distinct ball elements (seeded).
std::vector<GroupElement> sample_ball_elements(const Ball& ball, int count, uint64_t seed);

}  // namespace isocomp
