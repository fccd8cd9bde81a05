// Command-line frontend: reproducible experiment runner emitting CSV/JSON.
//
// Exit codes: 0 success, 1 failed internal invariant, 2 usage error,
// 3 resource (budget/radius) error.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "isocomp/cocycles.hpp"
#include "isocomp/embeddings.hpp"
#include "isocomp/isoperimetry.hpp"
#include "isocomp/moduli.hpp"
#include "isocomp/walks.hpp"

using namespace isocomp;

namespace {

struct Table {
    std::string config;
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void addRow(std::initializer_list<std::string> cells) { rows.emplace_back(cells); }

    void writeCsv(std::ostream& os) const {
        os << "# config: " << config << "\n";
        os << "# version: " << kVersion << "\n";
        for (const auto& c : comments) os << "# " << c << "\n";
        for (size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
        os << "\n";
        for (const auto& row : rows) {
            for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
            os << "\n";
        }
    }

    void writeJson(std::ostream& os) const {
        nlohmann::json j;
        j["config"] = config;
        j["version"] = kVersion;
        for (const auto& c : comments) j["notes"].push_back(c);
        j["rows"] = nlohmann::json::array();
        for (const auto& row : rows) {
            nlohmann::json r;
            for (size_t i = 0; i < row.size(); ++i) r[columns[i]] = row[i];
            j["rows"].push_back(r);
        }
        os << j.dump(2) << "\n";
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

struct Output {
    std::string path;
    std::string format = "csv";

    void emit(const Table& t) const {
        if (path.empty()) {
            format == "json" ? t.writeJson(std::cout) : t.writeCsv(std::cout);
        } else {
            std::ofstream os(path);
            if (!os) throw UsageError("cannot open output file " + path);
            format == "json" ? t.writeJson(os) : t.writeCsv(os);
        }
    }
};

std::shared_ptr<const MarkedGroup> groupOf(const std::string& spec) {
    return std::make_shared<const MarkedGroup>(MarkedGroup::parse(spec));
}

/// cone function m+1-|x| on B(1,m); the variational seed for pullback blocks
GroupFunction coneFunction(std::shared_ptr<const Ball> ball, int m) {
    std::vector<std::pair<int32_t, double>> e;
    for (int32_t i = 0; i < ball->volume(m); ++i)
        e.emplace_back(i, static_cast<double>(m + 1 - ball->length(i)));
    return GroupFunction(ball, std::move(e));
}

struct AssembleSetup {
    std::vector<std::pair<std::shared_ptr<const Cocycle>, CompressionCurve>> blocks;
    CompressionCurve M;
};

/// The Z wr Z block family used by `assemble`: b_k = LampConfig + the
/// pullback through theta of the variational cocycle of a cone on B(1, 2^k)
/// in C2 wr Z, normalized to generator norm <= 1. M is the pointwise minimum
/// of the measured block curves (a certified lower bound for every block).
AssembleSetup zwrzBlockFamily(const std::shared_ptr<const Ball>& ball, int K, double p) {
    auto ZZ = ball->groupPtr();
    int maxCone = 1 << (K - 1);
    auto C2 = groupOf("C2wrZ");
    auto c2Ball = enumerate_ball(C2, ball->radius() + maxCone + 1);
    auto lamp = std::make_shared<LampConfigCocycle>(ZZ);
    AssembleSetup setup;
    for (int k = 0; k < K; ++k) {
        auto inner = std::make_shared<VariationalCocycle>(coneFunction(c2Ball, 1 << k));
        auto pb = std::make_shared<ThetaPullbackCocycle>(ZZ, inner);
        auto block = std::make_shared<ScaledSumCocycle>(
            std::vector<std::pair<double, std::shared_ptr<const Cocycle>>>{{1.0, lamp},
                                                                           {1.0, pb}});
        double gn = std::pow(block->maxGeneratorNormP(p), 1.0 / p);
        auto normalized = std::make_shared<ScaledSumCocycle>(
            std::vector<std::pair<double, std::shared_ptr<const Cocycle>>>{{1.0 / gn, block}});
        setup.blocks.emplace_back(normalized, cocycle_compression(*normalized, *ball, p));
    }
    setup.M = setup.blocks.front().second;
    for (const auto& [b, c] : setup.blocks)
        for (int t = 1; t <= setup.M.tmax(); ++t)
            setup.M.rho[t - 1] = std::min(setup.M.rho[t - 1], c.at(t));
    return setup;
}

int runApp(int argc, char** argv) {
    CLI::App app{"desk-scale certificates for isoperimetric profiles, tree embeddings and "
                 "cocycle compression on concrete groups"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags (--seed, --budget, --out, ...) after subcommands
    Output out;
    app.add_option("--out", out.path, "output file (default: stdout)");
    app.add_option("--format", out.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    int64_t budget = 20'000'000;
    app.add_option("--budget", budget, "ball enumeration element budget");
    uint64_t seed = 1;
    app.add_option("--seed", seed, "seed for randomized components");
    int threads = 1;
    app.add_option("--threads", threads, "parallel restarts where supported");

    // --- ball ---------------------------------------------------------------
    auto* ballCmd = app.add_subcommand("ball", "enumerate a Cayley ball; CSV columns "
                                               "(index,length,normalform)");
    std::string groupSpec = "Z";
    int radius = 3;
    bool summary = false;
    ballCmd->add_option("--group", groupSpec, "Z, Z^d, Fr, CmwrZ, ZwrZ")->required();
    ballCmd->add_option("--n", radius, "ball radius")->required();
    ballCmd->add_flag("--summary", summary, "emit (k,V(k),S(k)) per radius instead of elements");
    ballCmd->callback([&] {
        auto ball = enumerate_ball(groupOf(groupSpec), radius, budget);
        Table t;
        if (summary) {
            t.columns = {"k", "volume", "sphere"};
            for (int k = 0; k <= radius; ++k)
                t.addRow({std::to_string(k), std::to_string(ball->volume(k)),
                          std::to_string(ball->sphereSize(k))});
        } else {
            t.columns = {"index", "length", "normalform"};
            for (int32_t i = 0; i < ball->size(); ++i)
                t.addRow({std::to_string(i), std::to_string(ball->length(i)),
                          ball->group().toString(ball->element(i))});
        }
        t.config = "ball --group " + groupSpec + " --n " + std::to_string(radius);
        out.emit(t);
    });

    // --- profile ------------------------------------------------------------
    auto* profileCmd = app.add_subcommand(
        "profile", "lower bounds for the L^p-isoperimetric profile inside balls; CSV "
                   "(n,t_support,ratio,method)");
    double p = 2.0;
    int nScale = 4;
    std::string method = "pair";
    int tSupport = -1;
    int restarts = 8;
    profileCmd->add_option("--group", groupSpec)->required();
    profileCmd->add_option("--p", p, "exponent p >= 1");
    profileCmd->add_option("--method", method)->check(CLI::IsMember({"pair", "growth", "heuristic"}));
    profileCmd->add_option("--n", nScale, "scale n (pair/growth) ");
    profileCmd->add_option("--t", tSupport, "support radius (heuristic; default n)");
    profileCmd->add_option("--restarts", restarts);
    profileCmd->callback([&] {
        Table t;
        t.columns = {"n", "t_support", "ratio", "method"};
        if (method == "pair") {
            auto G = MarkedGroup::parse(groupSpec);
            if (G.family() != Family::WreathFiniteOverZ)
                throw UsageError("profile --method pair supports CmwrZ groups");
            for (int n = 1; n <= nScale; ++n) {
                auto cert = lamplighter_pair_certificate(G.param(), n, p);
                t.addRow({std::to_string(n), std::to_string(cert.tSupport), fmt(cert.ratio),
                          method});
            }
        } else if (method == "growth") {
            auto ball = enumerate_ball(groupOf(groupSpec), nScale, budget);
            auto g = profile_growth_certificate(ball, nScale, p);
            g.cert.verifySound();
            t.addRow({std::to_string(nScale), std::to_string(g.cert.t), fmt(g.cert.ratio),
                      method});
        } else {
            int tt = tSupport >= 0 ? tSupport : nScale;
            auto ball = enumerate_ball(groupOf(groupSpec), tt + 1, budget);
            auto cert = profile_heuristic_max(ball, tt, p, restarts, seed, 200, threads);
            cert.verifySound();
            t.addRow({std::to_string(nScale), std::to_string(cert.t), fmt(cert.ratio), method});
        }
        t.config = "profile --group " + groupSpec + " --p " + fmt(p) + " --method " + method +
                   " --n " + std::to_string(nScale) + " --seed " + std::to_string(seed);
        out.emit(t);
    });

    // --- folner -------------------------------------------------------------
    auto* folnerCmd = app.add_subcommand(
        "folner", "verify controlled Folner pairs; CSV (n,cond1,C2,C3,pigeonJ,pigeonRatio)");
    folnerCmd->add_option("--group", groupSpec)->required();
    folnerCmd->add_option("--n", nScale, "verify pairs for 1 <= n <= this")->required();
    folnerCmd->callback([&] {
        auto G = MarkedGroup::parse(groupSpec);
        if (G.family() != Family::WreathFiniteOverZ)
            throw UsageError("folner supports CmwrZ groups (product-form pairs)");
        Table t;
        t.columns = {"n", "cond1", "C2", "C3", "pigeonJ", "pigeonRatio"};
        for (int n = 1; n <= nScale; ++n) {
            auto rep = verify_lamplighter_pair(G.param(), n);
            auto fs = lamplighter_folner_from_pair(G.param(), n);
            t.addRow({std::to_string(n), rep.cond1 ? "true" : "false", fmt(rep.C2), fmt(rep.C3),
                      std::to_string(fs.j), fmt(fs.boundaryRatio)});
        }
        t.config = "folner --group " + groupSpec + " --n " + std::to_string(nScale);
        out.emit(t);
    });

    // --- tree-embed ---------------------------------------------------------
    auto* treeCmd = app.add_subcommand(
        "tree-embed", "spherical embedding of the depth-J binary tree; CSV (t,rho,f,ratio)");
    int J = 12;
    std::string modulusSpec = "pow:0.7";
    treeCmd->add_option("--J", J, "tree depth (<= 20)")->required();
    treeCmd->add_option("--p", p);
    treeCmd->add_option("--f", modulusSpec, "compression modulus, e.g. pow:0.7");
    treeCmd->callback([&] {
        auto f = CompressionModulus::parse(modulusSpec);
        auto xs = build_xi(f, p, 2 * J + 4);
        auto curve = tree_compression_curve_binary(J, xs);
        Table t;
        t.columns = {"t", "rho", "f", "ratio"};
        double cf = std::numeric_limits<double>::infinity();
        for (int tt = 1; tt <= 2 * J; ++tt) {
            double ft = f.eval(tt);
            double ratio = ft > 0 ? curve.at(tt) / ft : 0.0;
            cf = std::min(cf, ratio);
            t.addRow({std::to_string(tt), fmt(curve.at(tt)), fmt(ft), fmt(ratio)});
        }
        t.comments.push_back("lipschitz: " + fmt(curve.lipschitz));
        t.comments.push_back("c_f = min ratio: " + fmt(cf));
        if (xs.cpWarning) t.comments.push_back("warning: f fails (C_p)");
        t.config = "tree-embed --J " + std::to_string(J) + " --p " + fmt(p) + " --f " +
                   modulusSpec;
        out.emit(t);
    });

    // --- bourgain-check -----------------------------------------------------
    auto* bourgainCmd = app.add_subcommand(
        "bourgain-check",
        "finite-tree obstruction integral; CSV (J,integral,minRatio,bound)");
    std::string rangeSpec = "4..12";
    double q = 2.0;
    bourgainCmd->add_option("--J", rangeSpec, "range a..b")->required();
    bourgainCmd->add_option("--q", q, "uniform convexity exponent (> 1)");
    bourgainCmd->add_option("--p", p, "embedding exponent");
    bourgainCmd->add_option("--f", modulusSpec);
    bourgainCmd->callback([&] {
        auto dots = rangeSpec.find("..");
        int lo, hi;
        if (dots == std::string::npos) {
            lo = hi = std::stoi(rangeSpec);
        } else {
            lo = std::stoi(rangeSpec.substr(0, dots));
            hi = std::stoi(rangeSpec.substr(dots + 2));
        }
        if (lo < 1 || hi < lo) throw UsageError("bad --J range");
        auto f = CompressionModulus::parse(modulusSpec);
        auto xs = build_xi(f, p, 2 * hi + 4);
        Table t;
        t.columns = {"J", "integral", "minRatio", "bound"};
        for (int JJ = lo; JJ <= hi; ++JJ) {
            auto curve = tree_compression_curve_binary(JJ, xs);
            double I = bourgain_integral(curve, q, JJ, curve.lipschitz);
            double minRatio = tree_min_ratio_binary(JJ, xs) / curve.lipschitz;
            double bound = std::pow(I / std::log(static_cast<double>(JJ)), 1.0 / q);
            t.addRow({std::to_string(JJ), fmt(I), fmt(minRatio), fmt(bound)});
        }
        t.config = "bourgain-check --J " + rangeSpec + " --q " + fmt(q) + " --f " + modulusSpec;
        out.emit(t);
    });

    // --- cp-check -----------------------------------------------------------
    auto* cpCmd = app.add_subcommand("cp-check", "(C_p) classifier; CSV "
                                                 "(f,p,verdict,partialIntegral,tailEstimate)");
    cpCmd->add_option("--f", modulusSpec)->required();
    cpCmd->add_option("--p", p);
    cpCmd->callback([&] {
        auto f = CompressionModulus::parse(modulusSpec);
        auto rep = check_Cp(f, p);
        Table t;
        t.columns = {"f", "p", "verdict", "partialIntegral", "tailEstimate"};
        t.addRow({modulusSpec, fmt(p), to_string(rep.verdict), fmt(rep.partialIntegral),
                  fmt(rep.tailEstimate)});
        t.config = "cp-check --f " + modulusSpec + " --p " + fmt(p);
        out.emit(t);
    });

    // --- zwrz ---------------------------------------------------------------
    auto* zwrzCmd = app.add_subcommand(
        "zwrz", "pointwise Z wr Z compression bound; CSV (t,infMax,certifiedC)");
    zwrzCmd->add_option("--radius", radius)->required();
    zwrzCmd->add_option("--p", p);
    zwrzCmd->callback([&] {
        auto ball = enumerate_ball(groupOf("ZwrZ"), radius, budget);
        auto rep = zwrz_lower_bound(*ball, p);
        Table t;
        t.columns = {"t", "infMax", "certifiedC"};
        for (int tt = 1; tt <= radius; ++tt)
            t.addRow({std::to_string(tt), fmt(rep.tailInf[tt - 1]), fmt(rep.c)});
        t.comments.push_back("exponent p/(2p-1): " + fmt(rep.exponent));
        t.comments.push_back("fitted log-log slope: " + fmt(rep.fittedExponent));
        t.comments.push_back("two-case audit violations: case1 " +
                             std::to_string(rep.case1Violations) + ", case2 " +
                             std::to_string(rep.case2Violations));
        t.comments.push_back("worst element: " + rep.worstElement);
        t.config = "zwrz --radius " + std::to_string(radius) + " --p " + fmt(p);
        out.emit(t);
    });

    // --- assemble -----------------------------------------------------------
    auto* asmCmd = app.add_subcommand(
        "assemble", "dyadic direct-sum cocycle on Z wr Z; CSV (k,guaranteed,measured)");
    int K = 3;
    modulusSpec = "pow:0.7";
    std::string asmModulus = "pow:0.6";
    asmCmd->add_option("--f", asmModulus)->required();
    asmCmd->add_option("--K", K, "number of dyadic blocks");
    asmCmd->add_option("--radius", radius, "Z wr Z ball radius")->required();
    asmCmd->add_option("--p", p);
    asmCmd->callback([&] {
        if (radius < (1 << K)) throw UsageError("assemble: radius must reach 2^K");
        auto ball = enumerate_ball(groupOf("ZwrZ"), radius, budget);
        auto setup = zwrzBlockFamily(ball, K, p);
        auto f = CompressionModulus::parse(asmModulus);
        auto assembled = assemble_dyadic(setup.blocks, f, setup.M, K, p);
        auto curve = cocycle_compression(*assembled.cocycle, *ball, p);
        Table t;
        t.columns = {"k", "guaranteed", "measured"};
        for (int k = 0; k < K; ++k)
            t.addRow({std::to_string(k), fmt(f.eval(static_cast<double>(1 << k))),
                      fmt(curve.at(1 << (k + 1)))});
        t.comments.push_back("generator norm sum^p: " + fmt(assembled.generatorNormSumP));
        t.config = "assemble --f " + asmModulus + " --K " + std::to_string(K) + " --radius " +
                   std::to_string(radius) + " --p " + fmt(p);
        out.emit(t);
    });

    // --- walk ---------------------------------------------------------------
    auto* walkCmd = app.add_subcommand(
        "walk", "lazy random walk and its profile certificate; CSV "
                "(n,returnProb,psi,selectedQ,certRatio)");
    int walkN = 8;
    int64_t trials = 0;
    walkCmd->add_option("--group", groupSpec)->required();
    walkCmd->add_option("--n", walkN)->required();
    walkCmd->add_option("--simulate", trials, "Monte-Carlo trials (exploratory, not certified)");
    walkCmd->callback([&] {
        auto ball = enumerate_ball(groupOf(groupSpec), 2 * walkN, budget);
        auto nu = WalkMeasure::lazyUniform(ball);
        auto res = walk_profile_certificate(nu, walkN);
        Table t;
        t.columns = {"n", "returnProb", "psi", "selectedQ", "certRatio"};
        t.addRow({std::to_string(walkN), fmt(return_probability(nu, walkN)), fmt(res.psi[walkN]),
                  std::to_string(res.selectedQ), fmt(res.certRatio)});
        if (trials > 0) {
            double sim = simulate_return_probability(nu, walkN, trials, seed);
            t.comments.push_back("simulated return probability (NOT certified): " + fmt(sim) +
                                 " from " + std::to_string(trials) + " trials");
        }
        t.config = "walk --group " + groupSpec + " --n " + std::to_string(walkN) + " --seed " +
                   std::to_string(seed);
        out.emit(t);
    });

    // --- schoenberg ---------------------------------------------------------
    auto* schCmd = app.add_subcommand(
        "schoenberg", "positive-definiteness of the Gaussian cocycle kernel; CSV "
                      "(t,minEigenvalue,normK,tolerance)");
    std::string tList = "1,4,16";
    int sampleSize = 50;
    schCmd->add_option("--radius", radius, "Z wr Z sample ball radius");
    schCmd->add_option("--sample", sampleSize);
    schCmd->add_option("--t", tList, "comma-separated kernel widths");
    schCmd->callback([&] {
        auto ZZ = groupOf("ZwrZ");
        auto ball = enumerate_ball(ZZ, radius, budget);
        LampConfigCocycle b(ZZ);
        auto sample = sample_ball_elements(*ball, sampleSize, seed);
        Table t;
        t.columns = {"t", "minEigenvalue", "normK", "tolerance"};
        std::stringstream ss(tList);
        std::string item;
        while (std::getline(ss, item, ',')) {
            double tt = std::stod(item);
            auto rep = schoenberg_psd_check(b, sample, tt, 2.0);
            t.addRow({fmt(tt), fmt(rep.minEigenvalue), fmt(rep.normK), fmt(-1e-8 * rep.normK)});
            if (rep.minEigenvalue < -1e-8 * rep.normK)
                throw InvariantError("schoenberg: kernel not positive semidefinite");
        }
        t.config = "schoenberg --radius " + std::to_string(radius) + " --sample " +
                   std::to_string(sampleSize) + " --t " + tList + " --seed " +
                   std::to_string(seed);
        out.emit(t);
    });

    // default radius for schoenberg when --radius is omitted
    radius = 8;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // bad flags are usage errors
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return runApp(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 3;
    } catch (const InvariantError& e) {
        std::cerr << "invariant failed: " << e.what() << "\n";
        return 1;
    } catch (const PrecisionError& e) {
        std::cerr << "precision error: " << e.what() << "\n";
        return 2;
    } catch (const CLI::Error&) {
        return 2;  // unreachable: CLI11_PARSE handles it
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
