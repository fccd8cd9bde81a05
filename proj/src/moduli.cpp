#include "isocomp/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace isocomp {

namespace {

double shiftedLog(double t) { return 1.0 + std::log(t); }

}  // namespace

double CompressionModulus::rawEval(double t) const {
    switch (kind) {
        case Kind::Power:
            return std::pow(t, a);
        case Kind::PowerLog:
            return std::pow(t, a) / std::pow(shiftedLog(t), b);
        case Kind::PowerLogLog:
        default:
            return std::pow(t, a) /
                   (std::pow(shiftedLog(t), b) * std::pow(1.0 + std::log(shiftedLog(t)), c));
    }
}

double CompressionModulus::eval(double t) const {
    if (t < 1.0) throw UsageError("CompressionModulus: defined for t >= 1");
    switch (kind) {
        case Kind::Power:
            return std::pow(t, a);
        case Kind::PowerLog:
        case Kind::PowerLogLog:
            // the raw form can dip just after t = 1 (log factors blowing up);
            // the monotone hull max(raw(1), raw(t)) is exact wherever the raw
            // form is itself monotone and has the same asymptotics
            return std::max(rawEval(1.0), rawEval(t));
        case Kind::LacunarStep: {
            auto it = std::upper_bound(knotT.begin(), knotT.end(), t);
            if (it == knotT.begin()) return knotV.front();
            return knotV[static_cast<size_t>(it - knotT.begin()) - 1];
        }
        case Kind::Tabulated: {
            if (t <= knotT.front()) return knotV.front();
            if (t >= knotT.back()) return knotV.back();
            auto it = std::upper_bound(knotT.begin(), knotT.end(), t);
            size_t i = static_cast<size_t>(it - knotT.begin());
            double w = (t - knotT[i - 1]) / (knotT[i] - knotT[i - 1]);
            return knotV[i - 1] + w * (knotV[i] - knotV[i - 1]);
        }
    }
    return 0;
}

bool CompressionModulus::isNondecreasing(double tmax, int gridPoints) const {
    if (kind == Kind::Power || kind == Kind::PowerLog || kind == Kind::PowerLogLog) {
        // hull evaluation is monotone by construction, but an asymptotically
        // decreasing raw form would be silently flattened; refuse those
        if (a > 0) return true;
        if (a < 0) return false;
        if (kind == Kind::Power) return true;
        if (kind == Kind::PowerLog) return b <= 0;
        return b < 0 || (b == 0 && c <= 0);
    }
    double prev = eval(1.0);
    for (int i = 1; i <= gridPoints; ++i) {
        double t = std::exp(std::log(tmax) * i / gridPoints);
        double v = eval(std::max(1.0, t));
        if (v < prev * (1 - 1e-12) - 1e-300) return false;
        prev = std::max(prev, v);
    }
    return true;
}

CompressionModulus CompressionModulus::power(double a) {
    CompressionModulus f;
    f.kind = Kind::Power;
    f.a = a;
    return f;
}

CompressionModulus CompressionModulus::powerLog(double a, double b) {
    CompressionModulus f;
    f.kind = Kind::PowerLog;
    f.a = a;
    f.b = b;
    return f;
}

CompressionModulus CompressionModulus::powerLogLog(double a, double b, double c) {
    CompressionModulus f;
    f.kind = Kind::PowerLogLog;
    f.a = a;
    f.b = b;
    f.c = c;
    return f;
}

CompressionModulus CompressionModulus::lacunar(std::vector<double> t, std::vector<double> v) {
    if (t.empty() || t.size() != v.size()) throw UsageError("lacunar: bad knots");
    if (!std::is_sorted(t.begin(), t.end())) throw UsageError("lacunar: knots must increase");
    CompressionModulus f;
    f.kind = Kind::LacunarStep;
    f.knotT = std::move(t);
    f.knotV = std::move(v);
    return f;
}

CompressionModulus CompressionModulus::tabulated(std::vector<double> t, std::vector<double> v) {
    if (t.size() < 2 || t.size() != v.size()) throw UsageError("tabulated: bad knots");
    if (!std::is_sorted(t.begin(), t.end())) throw UsageError("tabulated: knots must increase");
    CompressionModulus f;
    f.kind = Kind::Tabulated;
    f.knotT = std::move(t);
    f.knotV = std::move(v);
    return f;
}

CompressionModulus CompressionModulus::parse(const std::string& spec) {
    if (spec == "lin") return power(1.0);
    if (spec == "zero") return tabulated({1.0, 2.0}, {0.0, 0.0});
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    auto num = [&](size_t i) {
        try {
            return std::stod(parts.at(i));
        } catch (...) {
            throw UsageError("bad modulus spec '" + spec + "'");
        }
    };
    if (parts.size() == 2 && parts[0] == "pow") return power(num(1));
    if (parts.size() == 3 && parts[0] == "powlog") return powerLog(num(1), num(2));
    if (parts.size() == 4 && parts[0] == "powloglog")
        return powerLogLog(num(1), num(2), num(3));
    throw UsageError("unknown modulus spec '" + spec +
                     "' (expected pow:a, powlog:a:b, powloglog:a:b:c, lin, zero)");
}

std::string CompressionModulus::str() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Power: os << "pow:" << a; break;
        case Kind::PowerLog: os << "powlog:" << a << ":" << b; break;
        case Kind::PowerLogLog: os << "powloglog:" << a << ":" << b << ":" << c; break;
        case Kind::LacunarStep: os << "lacunar[" << knotT.size() << "]"; break;
        case Kind::Tabulated: os << "tabulated[" << knotT.size() << "]"; break;
    }
    return os.str();
}

std::string to_string(CpVerdict v) {
    switch (v) {
        case CpVerdict::Converges: return "converges";
        case CpVerdict::Diverges: return "diverges";
        default: return "inconclusive";
    }
}

namespace {

/// Adaptive trapezoid of g over [lo, hi]: halve until the refinement changes
/// the value by less than relTol.
template <class F>
double refineTrapezoid(const F& g, double lo, double hi, double relTol = 1e-9) {
    int n = 4;
    double h = (hi - lo) / n;
    double prev = 0.5 * (g(lo) + g(hi));
    for (int i = 1; i < n; ++i) prev += g(lo + i * h);
    prev *= h;
    for (int depth = 0; depth < 18; ++depth) {
        n *= 2;
        h = (hi - lo) / n;
        double sum = 0.5 * (g(lo) + g(hi));
        for (int i = 1; i < n; ++i) sum += g(lo + i * h);
        sum *= h;
        if (std::fabs(sum - prev) <= relTol * std::max(std::fabs(sum), 1e-300)) return sum;
        prev = sum;
    }
    return prev;
}

}  // namespace

CpReport check_Cp(const CompressionModulus& f, double p) {
    if (p < 1) throw UsageError("check_Cp: p must be >= 1");
    if (!f.isNondecreasing()) throw UsageError("check_Cp: f is not nondecreasing on [1,inf)");
    CpReport rep;

    auto integrand = [&](double t) {
        double v = f.eval(t) / t;
        return std::pow(v, p) / t;
    };
    KahanSum partial;
    double T = std::pow(2.0, 40);
    for (int k = 0; k < 40; ++k)
        partial.add(refineTrapezoid(integrand, std::pow(2.0, k), std::pow(2.0, k + 1)));
    rep.partialIntegral = partial.value();

    using Kind = CompressionModulus::Kind;
    switch (f.kind) {
        case Kind::Power:
        case Kind::PowerLog:
        case Kind::PowerLogLog: {
            double a = f.a;
            double bp = f.kind == Kind::Power ? 0.0 : f.b * p;
            double cp = f.kind == Kind::PowerLogLog ? f.c * p : 0.0;
            if (a < 1) {
                // (f/t)^p / t <= t^((a-1)p - 1); tail from T in closed form
                rep.tailEstimate = std::pow(T, (a - 1) * p) / ((1 - a) * p);
                rep.verdict = CpVerdict::Converges;
            } else if (a > 1) {
                rep.verdict = CpVerdict::Diverges;
            } else if (bp > 1) {
                // integrand <= 1/(t (1+log t)^bp); antiderivative is explicit
                rep.tailEstimate = std::pow(shiftedLog(T), 1 - bp) / (bp - 1);
                rep.verdict = CpVerdict::Converges;
            } else if (bp == 1 && cp > 1) {
                rep.tailEstimate = std::pow(1 + std::log(shiftedLog(T)), 1 - cp) / (cp - 1);
                rep.verdict = CpVerdict::Converges;
            } else {
                rep.verdict = CpVerdict::Diverges;
            }
            break;
        }
        case Kind::LacunarStep: {
            // constant = v beyond the last knot: tail = (v/T)^p / p
            double v = f.knotV.back();
            rep.tailEstimate = std::pow(v / T, p) / p;
            rep.verdict = CpVerdict::Converges;
            break;
        }
        case Kind::Tabulated: {
            rep.verdict = CpVerdict::Inconclusive;
            break;
        }
    }
    return rep;
}

LacunarResult lacunar_modulus(const CompressionModulus& h, double p) {
    if (p < 1) throw UsageError("lacunar_modulus: p must be >= 1");
    if (!h.isNondecreasing()) throw UsageError("lacunar_modulus: h must be increasing");
    // sublinear: h(t)/t decreasing on a dyadic grid, and at least halved by
    // the far end of the grid
    double prevRatio = h.eval(1.0);
    for (int k = 1; k <= 40; ++k) {
        double t = std::pow(2.0, k);
        double r = h.eval(t) / t;
        if (r > prevRatio * (1 + 1e-9)) throw UsageError("lacunar_modulus: h is not sublinear");
        prevRatio = r;
    }
    if (h.eval(std::pow(2.0, 40)) / std::pow(2.0, 40) > 0.5 * h.eval(2.0) / 2.0)
        throw UsageError("lacunar_modulus: h(t)/t does not tend to 0 on the grid");

    LacunarResult out;
    double n = 1.0;
    KahanSum series;
    int i = 0;
    const double scale = std::max(1.0, std::pow(h.eval(1.0), p));
    while (n <= std::pow(2.0, 38) && i < 64) {
        out.breakpoints.push_back(n);
        series.add(std::pow(h.eval(n) / n, p));
        // next breakpoint: the smallest power-of-two step that keeps the
        // series summable (term <= scale * 2^-i) and the sequence geometric
        double next = 2 * n;
        while (next <= std::pow(2.0, 39) &&
               std::pow(h.eval(next) / next, p) > scale * std::pow(0.5, i))
            next *= 2;
        n = next;
        ++i;
    }
    out.seriesSum = series.value();
    std::vector<double> vals;
    for (double t : out.breakpoints) vals.push_back(h.eval(t));
    out.f = CompressionModulus::lacunar(out.breakpoints, std::move(vals));
    out.c = 1.0;
    CpReport rep = check_Cp(out.f, p);
    if (rep.verdict != CpVerdict::Converges)
        throw InvariantError("lacunar_modulus: constructed f failed the (C_p) classifier");
    return out;
}

}  // namespace isocomp
