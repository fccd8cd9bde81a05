#pragma once

#include <memory>
#include <vector>

#include "isocomp/common.hpp"
#include "isocomp/groups.hpp"

namespace isocomp {

struct WalkMeasure;

/// What to do when an evaluation needs a point outside the enumerated ball:
/// Strict raises PrecisionError; Truncate drops the point and flags the
/// result (silent truncation could fake isoperimetric certificates).
enum class BoundaryPolicy { Strict, Truncate };

/// A finitely supported real function on an enumerated ball; no explicit
/// zeros, entries sorted by element index, counting measure throughout.
class GroupFunction {
public:
    GroupFunction() = default;
    GroupFunction(std::shared_ptr<const Ball> ball,
                  std::vector<std::pair<int32_t, double>> entries);

    const Ball& ball() const { return *ball_; }
    std::shared_ptr<const Ball> ballPtr() const { return ball_; }
    const std::vector<std::pair<int32_t, double>>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    size_t supportSize() const { return entries_.size(); }

    double at(int32_t index) const;  // 0 if absent
    /// max |g| over the support (0 for the zero function).
    int supportRadius() const;

    static GroupFunction indicator(std::shared_ptr<const Ball> ball,
                                   const std::vector<int32_t>& indices);
    /// indicator of the sub-ball B(1,k)
    static GroupFunction ballIndicator(std::shared_ptr<const Ball> ball, int k);

private:
    std::shared_ptr<const Ball> ball_;
    std::vector<std::pair<int32_t, double>> entries_;
};

/// (sum |phi|^p)^(1/p) with compensated summation. p >= 1.
double lp_norm(const GroupFunction& phi, double p);

double linf_norm(const GroupFunction& phi);

struct GradientResult {
    GroupFunction grad;        // |grad phi| on the enumerated part of its support
    bool touchedBoundary;      // true iff some support point of |grad phi| fell outside
};

/// Left sup-gradient |grad phi|(g) = max_{s in S} |phi(sg) - phi(g)|,
/// evaluated on supp(phi) enlarged by one left-S step. phi is treated as 0
/// outside the ball (exact, since supp(phi) is inside).
GradientResult gradient_sup(const GroupFunction& phi,
                            BoundaryPolicy policy = BoundaryPolicy::Strict);

/// Exact ||grad phi||_p even when supp(phi) touches the ball boundary: the
/// ring outside the ball is reconstructed algebraically.
double gradient_sup_norm(const GroupFunction& phi, double p);

/// lambda(g) phi = phi(g^-1 .): support translates to g*supp(phi).
GroupFunction left_translate(const GroupElement& g, const GroupFunction& phi,
                             BoundaryPolicy policy = BoundaryPolicy::Strict);

/// phi o R_h: x -> phi(x h).
GroupFunction right_translate(const GroupFunction& phi, const GroupElement& h,
                              BoundaryPolicy policy = BoundaryPolicy::Strict);

/// Var_p(phi, t) = inf over enumerated g with |g| >= t of ||phi - lambda(g)phi||_p.
/// Beyond twice the support radius the value is exactly 2^(1/p) ||phi||_p and
/// is not re-enumerated.
double variation(const GroupFunction& phi, double t, double p);

/// (nu * phi)(x) = sum_g nu(g) phi(g^-1 x).
GroupFunction convolve(const WalkMeasure& nu, const GroupFunction& phi,
                       BoundaryPolicy policy = BoundaryPolicy::Strict);

/// sum_g sum_s nu2(s) |phi(sg) - phi(g)|^2 where nu2 = nu * nu, computed
/// directly (including the ring outside the ball); equals
/// 2(||phi||_2^2 - ||nu*phi||_2^2).
double dirichlet_energy2(const WalkMeasure& nu, const GroupFunction& phi);

/// CSV dump: one "normalform,value" row per support point.
std::string function_to_csv(const GroupFunction& phi);

}  // namespace isocomp
