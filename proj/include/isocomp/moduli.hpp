#pragma once

#include <string>
#include <vector>

#include "isocomp/common.hpp"

namespace isocomp {

/// A candidate compression modulus f: nondecreasing on [1, infinity).
/// Logarithms are shifted (log -> 1 + log t) so that every kind is finite,
/// positive and monotone from t = 1 on without changing its asymptotics.
struct CompressionModulus {
    enum class Kind {
        Power,        // t^a
        PowerLog,     // t^a / (1+log t)^b
        PowerLogLog,  // t^a / ((1+log t)^b (1+log(1+log t))^c)
        LacunarStep,  // h(n_i) on [n_i, n_{i+1}), constant beyond the last n_i
        Tabulated,    // piecewise-linear through samples, constant beyond
    };

    Kind kind = Kind::Power;
    double a = 0, b = 0, c = 0;
    std::vector<double> knotT, knotV;  // LacunarStep / Tabulated

    /// Power/log kinds are evaluated through the monotone hull
    /// max(raw(1), raw(t)): exact where the raw form is monotone, and it
    /// irons out the dip the shifted logs have just after t = 1.
    double eval(double t) const;
    double rawEval(double t) const;  // analytic kinds only

    /// nondecreasing on [1, tmax]; analytic kinds are classified from their
    /// exponents (asymptotically decreasing raw forms are refused), knot
    /// kinds are checked on a dense multiplicative grid
    bool isNondecreasing(double tmax = 1e12, int gridPoints = 4096) const;

    static CompressionModulus power(double a);
    static CompressionModulus powerLog(double a, double b);
    static CompressionModulus powerLogLog(double a, double b, double c);
    static CompressionModulus lacunar(std::vector<double> t, std::vector<double> v);
    static CompressionModulus tabulated(std::vector<double> t, std::vector<double> v);

    /// "pow:0.7", "powlog:1:0.5", "powloglog:1:0.5:1", "lin" (= pow:1), "zero"
    static CompressionModulus parse(const std::string& spec);
    std::string str() const;
};

enum class CpVerdict { Converges, Diverges, Inconclusive };

struct CpReport {
    CpVerdict verdict = CpVerdict::Inconclusive;
    double partialIntegral = 0.0;  // dyadic trapezoid of (f/t)^p dt/t over [1, 2^40]
    double tailEstimate = 0.0;     // closed-form bound on the tail when convergent
};

/// Condition (C_p): integral over [1, infinity) of (f(t)/t)^p dt/t.
/// Numeric dyadic integral up to 2^40 plus an analytic tail comparison;
/// verdict is analytic for the power/log kinds and for step moduli
/// (constant tails), Inconclusive for plain tabulated data.
CpReport check_Cp(const CompressionModulus& f, double p);

std::string to_string(CpVerdict v);

struct LacunarResult {
    CompressionModulus f;            // step modulus with f(n_i) = h(n_i)
    double c = 1.0;                  // f(n_i) >= c h(n_i) by construction
    std::vector<double> breakpoints; // the n_i
    double seriesSum = 0.0;          // sum of (h(n_i)/n_i)^p
};

/// Given increasing sublinear h, pick a sparse (geometric-type) breakpoint
/// sequence with summable (h(n_i)/n_i)^p and return the step modulus that
/// touches h on every breakpoint; it always satisfies (C_p).
LacunarResult lacunar_modulus(const CompressionModulus& h, double p);

}  // namespace isocomp
