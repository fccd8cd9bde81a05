#pragma once

#include <memory>
#include <vector>

#include "isocomp/functions.hpp"
#include "isocomp/groups.hpp"

namespace isocomp {

struct ProfileCertificate;

/// A finitely supported symmetric probability measure on a ball, sparse on
/// element indices. The standard constructors support it on the generating
/// set; laziness means mass at the identity.
struct WalkMeasure {
    std::shared_ptr<const Ball> ball;
    std::vector<std::pair<int32_t, double>> mass;  // sorted by index, positive
    bool symmetric = false;
    bool lazy = false;

    /// mass 1/2 at the identity, the rest uniform on S \ {e}.
    static WalkMeasure lazyUniform(std::shared_ptr<const Ball> ball);
    /// uniform on S \ {e} (simple random walk).
    static WalkMeasure uniformOnGenerators(std::shared_ptr<const Ball> ball);

    double at(int32_t index) const;
    /// checks: total mass 1 within 1e-12, nu(g) = nu(g^-1) exactly.
    void validate() const;
};

/// Exact nu^(n) as a sparse function; requires S^n inside the ball radius.
GroupFunction convolution_power(const WalkMeasure& nu, int n);

/// nu^(n)(identity).
double return_probability(const WalkMeasure& nu, int n);

/// psi(q) = ||nu^(q)||_2^2 for q = 0..qmax.
std::vector<double> walk_psi(const WalkMeasure& nu, int qmax);

struct WalkCertificateResult {
    // defined in isoperimetry.hpp; stored by value via pointer to keep headers acyclic
    int selectedQ = 0;
    double nabla2Ratio = 0.0;      // ||(grad nu^(q*))_2||_2^2 / ||nu^(q*)||_2^2
    double pigeonholeBound = 0.0;  // (2/n) log(psi(n)/psi(2n))
    double certRatio = 0.0;        // ||phi||_2 / ||grad phi||_2 for phi = nu^(q*)
    double conversionConstant = 0.0;  // min_{s in S} nu^(2)(s)
    std::vector<double> psi;          // psi(0..2n)
    GroupFunction witness;
};

/// The random-walk-to-isoperimetry certificate: selects q* in [n, 2n]
/// minimizing the nabla_2 Rayleigh ratio of nu^(q) via the discrete energy
/// identity, then converts to a sup-gradient ProfileCertificate witnessed by
/// nu^(q*) (supported in S^(q*) inside B(1,2n)). nu must be lazy symmetric.
WalkCertificateResult walk_profile_certificate(const WalkMeasure& nu, int n);

/// Monte-Carlo estimate of nu^(n)(1); exploratory only, never certified.
double simulate_return_probability(const WalkMeasure& nu, int n, int64_t trials, uint64_t seed);

}  // namespace isocomp
