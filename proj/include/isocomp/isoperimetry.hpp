#pragma once

#include <memory>
#include <vector>

#include "isocomp/functions.hpp"
#include "isocomp/groups.hpp"

namespace isocomp {

/// An alpha-controlled Folner pair (H, H') inside an enumerated ball:
/// S^alpha H is expected inside H', |H'| <= C |H|, H' inside B(1, Cn).
struct FolnerPair {
    std::shared_ptr<const Ball> ball;
    int n = 0;      // scale
    int alpha = 0;  // control value alpha_n
    std::vector<int32_t> H;   // sorted element indices
    std::vector<int32_t> Hp;  // sorted element indices, H subset of Hp
};

struct FolnerReport {
    bool cond1 = false;       // S^alpha H inside H' (left form, matching the gradient)
    bool cond1Right = false;  // H S^alpha inside H' (logged, not certified)
    double C2 = 0.0;          // |H'| / |H|
    double C3 = 0.0;          // max word length in H' divided by n
};

FolnerReport verify_folner_pair(const FolnerPair& pair);

/// A sound lower-bound certificate for the isoperimetric profile inside
/// balls: ratio = ||phi||_p / ||grad phi||_p for the stored witness, with the
/// witness supported in B(1, t).
struct ProfileCertificate {
    int t = 0;          // support scale
    double p = 2.0;
    double ratio = 0.0;
    bool degenerate = false;  // zero witness or zero gradient
    GroupFunction witness;

    /// Recompute ratio from the witness (independent of how it was built).
    double recompute() const;
    /// InvariantError unless recompute() matches ratio to 1e-10 relative
    /// error and the witness support is inside B(1,t).
    void verifySound() const;
};

/// phi(g) = min{k : g in S^k (H')^c}; >= alpha on H, supported in H',
/// |grad phi| <= 1. Certified ratio >= alpha (|H|/|H'|)^(1/p).
ProfileCertificate pair_test_function(const FolnerPair& pair, double p);

struct FolnerSet {
    std::vector<int32_t> K;  // H subset K subset H'
    int j = 0;               // K = S^j H
    double boundaryRatio = 0.0;  // |S^(j+1)H \ S^j H| / |S^j H|
};

/// Pigeonhole extraction of a Folner set from a pair: the j in [0, alpha-1]
/// minimizing the boundary ratio; ratio <= C2/alpha.
FolnerSet folner_from_pair(const FolnerPair& pair);

struct GrowthCertificate {
    ProfileCertificate cert;
    int q = 0;        // maximizing scale q_n
    int j = 0;        // j(n) = max_{q <= n} k(q)
    std::vector<int> k;  // k(q) for q = 0..n
};

/// The volume-doubling test function phi_n = sum_{k=1}^{q_n - 1} 1_{B(1,k)}:
/// a certified profile lower bound of order n / log V(n).
GrowthCertificate profile_growth_certificate(std::shared_ptr<const Ball> ball, int n, double p);

/// Projected subgradient ascent on log(||phi||_p / ||grad phi||_p) over
/// nonnegative phi supported in B(1,t). Multi-restart, deterministic under a
/// fixed seed; a lower-bound generator with no optimality claim.
ProfileCertificate profile_heuristic_max(std::shared_ptr<const Ball> ball, int t, double p,
                                         int restarts, uint64_t seed, int iterations = 200,
                                         int threads = 1);

// ---------------------------------------------------------------------------
// Lamplighter (C_m wr Z) Folner pairs in product form: H_n = I_n x U_n,
// H'_n = I_2n x U_n with U_n = F^[-2n,2n], I_k = [-k,k], alpha_n = n.
// These sets are far too large to enumerate (|H_n| = (2n+1) m^(4n+1)), so the
// three conditions are verified exactly from the product structure; only S^n
// is enumerated.
// ---------------------------------------------------------------------------

struct LamplighterPairReport {
    int m = 2, n = 0;
    bool cond1 = false;     // S^n H_n inside H'_n, exact
    double sizeH = 0.0;     // (2n+1) m^(4n+1)
    double sizeHp = 0.0;    // (4n+1) m^(4n+1)
    double C2 = 0.0;        // (4n+1)/(2n+1)
    int64_t maxLenHp = 0;   // exact max word length over H'_n
    double C3 = 0.0;        // maxLenHp / n
};

LamplighterPairReport verify_lamplighter_pair(int m, int n);

struct LamplighterCertificate {
    int m = 2, n = 0;
    double p = 2.0;
    int tSupport = 0;    // = maxLenHp
    double ratio = 0.0;  // ||phi||_p / ||grad phi||_p, phi(k,u) = 2n+1-|k| on H'
    double normPhiP = 0.0;
    double normGradP = 0.0;
    /// Independent recomputation of ratio by per-cursor-slice summation.
    double recomputeBySlices() const;
};

/// The pair test function for the lamplighter pair in closed form: lamp
/// moves never leave H'_n, so phi(k,u) = 2n+1-|k| and the gradient is the
/// indicator of I_{2n+1} x U_n.
LamplighterCertificate lamplighter_pair_certificate(int m, int n, double p);

struct LamplighterFolnerSet {
    int j = 0;
    double muSjH = 0.0;    // exact |S^j H_n|
    double muSj1H = 0.0;   // exact |S^(j+1) H_n|
    double boundaryRatio = 0.0;
};

/// Pigeonhole Folner set for the lamplighter pair, with |S^j H_n| counted
/// exactly from coset structure (outside-pattern counting).
LamplighterFolnerSet lamplighter_folner_from_pair(int m, int n);

/// Materialize the lamplighter pair as explicit index sets (only feasible
/// for small n; used to cross-check the product-form computations).
FolnerPair materialize_lamplighter_pair(std::shared_ptr<const Ball> ball, int n);

}  // namespace isocomp
