#include "doctest.h"
#include "isocomp/cocycles.hpp"
#include "isocomp/functions.hpp"
#include "isocomp/isoperimetry.hpp"

#include <cmath>

using namespace isocomp;

namespace {

std::shared_ptr<const MarkedGroup> groupOf(const char* spec) {
    return std::make_shared<const MarkedGroup>(MarkedGroup::parse(spec));
}

GroupElement wreathElem(int64_t shift, std::vector<std::pair<int32_t, int32_t>> lamps) {
    return GroupElement{WreathData{shift, std::move(lamps)}};
}

/// cone function on the C2 wr Z ball: phi(x) = m+1-|x| on B(1,m)
GroupFunction coneFunction(std::shared_ptr<const Ball> ball, int m) {
    std::vector<std::pair<int32_t, double>> e;
    for (int32_t i = 0; i < ball->volume(m); ++i)
        e.emplace_back(i, static_cast<double>(m + 1 - ball->length(i)));
    return GroupFunction(ball, std::move(e));
}

}  // namespace

TEST_CASE("lamp cocycle values") {
    auto ZZ = groupOf("ZwrZ");
    LampConfigCocycle b(ZZ);
    CHECK(b.norm(ZZ->identity(), 2.0) == 0.0);
    CHECK(b.norm(wreathElem(3, {{0, 2}, {5, -1}}), 2.0) == doctest::Approx(std::sqrt(5.0)));
    CHECK(b.norm(wreathElem(-7, {}), 2.0) == 0.0);  // translations are invisible
    // max generator norm: the lamp generators contribute 1
    CHECK(b.maxGeneratorNormP(2.0) == doctest::Approx(1.0));
}

TEST_CASE("cocycle identity on random pairs, all variants") {
    auto ZZ = groupOf("ZwrZ");
    auto zzBall = enumerate_ball(ZZ, 5);
    auto C2 = groupOf("C2wrZ");
    auto c2Ball = enumerate_ball(C2, 12);

    auto lamp = std::make_shared<LampConfigCocycle>(ZZ);
    auto variational =
        std::make_shared<VariationalCocycle>(coneFunction(c2Ball, 2));
    auto pullback = std::make_shared<ThetaPullbackCocycle>(ZZ, variational);
    auto sum = std::make_shared<ScaledSumCocycle>(
        std::vector<std::pair<double, std::shared_ptr<const Cocycle>>>{{0.5, lamp},
                                                                       {1.25, pullback}});

    Rng rng(5);
    for (int trial = 0; trial < 1000; ++trial) {
        const GroupElement& g = zzBall->element(static_cast<int32_t>(rng.nextBelow(zzBall->size())));
        const GroupElement& h = zzBall->element(static_cast<int32_t>(rng.nextBelow(zzBall->size())));
        CHECK(cocycle_identity_error(*lamp, g, h, 2.0) <= 1e-12);
        CHECK(cocycle_identity_error(*pullback, g, h, 2.0) <= 1e-10);
        CHECK(cocycle_identity_error(*sum, g, h, 2.0) <= 1e-10);
    }
    Rng rng2(6);
    for (int trial = 0; trial < 1000; ++trial) {
        const GroupElement& g =
            c2Ball->element(static_cast<int32_t>(rng2.nextBelow(c2Ball->volume(4))));
        const GroupElement& h =
            c2Ball->element(static_cast<int32_t>(rng2.nextBelow(c2Ball->volume(4))));
        CHECK(cocycle_identity_error(*variational, g, h, 2.0) <= 1e-10);
    }
}

TEST_CASE("variational cocycle norm equals the variation machinery") {
    auto C2 = groupOf("C2wrZ");
    auto ball = enumerate_ball(C2, 9);
    GroupFunction phi = coneFunction(ball, 2);
    VariationalCocycle b(phi);
    for (int32_t i = 0; i < ball->volume(4); ++i) {
        const GroupElement& g = ball->element(i);
        // direct: ||phi - lambda(g) phi||
        GroupFunction lg = left_translate(g, phi);
        KahanSum s;
        for (int32_t x = 0; x < ball->size(); ++x) {
            double d = phi.at(x) - lg.at(x);
            if (d != 0.0) s.add(d * d);
        }
        CHECK(b.norm(g, 2.0) == doctest::Approx(std::sqrt(s.value())).epsilon(1e-12));
    }
    // and the compression curve at t matches inf over the sphere shells
    auto inner = enumerate_ball(C2, 7);  // radius + support radius <= 9
    auto curve = cocycle_compression(b, *inner, 2.0);
    double manual = std::numeric_limits<double>::infinity();
    for (int32_t i = 1; i < inner->size(); ++i)
        if (inner->length(i) >= 3) manual = std::min(manual, b.norm(inner->element(i), 2.0));
    CHECK(curve.at(3) == doctest::Approx(manual).epsilon(1e-12));
}

TEST_CASE("compression curves: zero cocycle, translations, disjoint supports") {
    auto ZZ = groupOf("ZwrZ");
    auto ball = enumerate_ball(ZZ, 8);
    LampConfigCocycle lamp(ZZ);
    auto curve = cocycle_compression(lamp, *ball, 2.0);
    // rho(1) = 0: pure translations carry no lamp mass (the cocycle alone is
    // not proper)
    CHECK(curve.at(1) == 0.0);
    CHECK(curve.at(8) == 0.0);

    // variational over Z: phi = 1_{B(1,t)}, rho(3t) = 2^(1/p) V(t)^(1/p)
    auto Z = groupOf("Z");
    auto zball = enumerate_ball(Z, 14);
    for (int t : {1, 2}) {
        GroupFunction phi = GroupFunction::ballIndicator(zball, t);
        VariationalCocycle b(phi);
        auto c = cocycle_compression(b, *enumerate_ball(Z, 3 * t + 2), 1.0);
        CHECK(c.at(3 * t) == doctest::Approx(2.0 * (2 * t + 1)).epsilon(1e-12));
        auto c2 = cocycle_compression(b, *enumerate_ball(Z, 3 * t + 2), 2.0);
        CHECK(c2.at(3 * t) ==
              doctest::Approx(std::sqrt(2.0) * std::sqrt(2.0 * t + 1)).epsilon(1e-12));
    }
}

TEST_CASE("compression is monotone and Lipschitz-bounded (validated)") {
    auto ZZ = groupOf("ZwrZ");
    auto ball = enumerate_ball(ZZ, 6);
    auto lamp = std::make_shared<LampConfigCocycle>(ZZ);
    auto C2 = groupOf("C2wrZ");
    auto c2Ball = enumerate_ball(C2, 10);
    auto pullback = std::make_shared<ThetaPullbackCocycle>(
        ZZ, std::make_shared<VariationalCocycle>(coneFunction(c2Ball, 2)));
    ScaledSumCocycle sum({{1.0, lamp}, {0.5, pullback}});
    auto curve = cocycle_compression(sum, *ball, 2.0);  // validate() runs inside
    // ScaledSum dominates each rescaled block pointwise
    auto lampCurve = cocycle_compression(*lamp, *ball, 2.0);
    auto pbCurve = cocycle_compression(*pullback, *ball, 2.0);
    for (int t = 1; t <= 6; ++t) {
        CHECK(curve.at(t) >= 1.0 * lampCurve.at(t) - 1e-12);
        CHECK(curve.at(t) >= 0.5 * pbCurve.at(t) - 1e-12);
    }
}

TEST_CASE("pullback consistency: compression factors through theta") {
    auto ZZ = groupOf("ZwrZ");
    auto ball = enumerate_ball(ZZ, 4);
    auto C2 = groupOf("C2wrZ");
    auto c2Ball = enumerate_ball(C2, 8);
    auto inner = std::make_shared<VariationalCocycle>(coneFunction(c2Ball, 1));
    ThetaPullbackCocycle pb(ZZ, inner);
    auto curve = cocycle_compression(pb, *ball, 2.0);
    for (int t = 1; t <= 4; ++t) {
        double manual = std::numeric_limits<double>::infinity();
        for (int32_t i = 1; i < ball->size(); ++i)
            if (ball->length(i) >= t)
                manual = std::min(manual, inner->norm(project_theta(ball->element(i)), 2.0));
        CHECK(curve.at(t) == doctest::Approx(manual).epsilon(1e-12));
    }
}

TEST_CASE("assemble_dyadic: K = 1 is a single rescaled cocycle") {
    auto ZZ = groupOf("ZwrZ");
    auto ball = enumerate_ball(ZZ, 4);
    auto C2 = groupOf("C2wrZ");
    auto c2Ball = enumerate_ball(C2, 8);
    auto inner = std::make_shared<VariationalCocycle>(coneFunction(c2Ball, 1));
    auto lamp = std::make_shared<LampConfigCocycle>(ZZ);
    auto pullback = std::make_shared<ThetaPullbackCocycle>(ZZ, inner);
    auto block = std::make_shared<ScaledSumCocycle>(
        std::vector<std::pair<double, std::shared_ptr<const Cocycle>>>{{1.0, lamp},
                                                                       {1.0, pullback}});
    auto curve = cocycle_compression(*block, *ball, 2.0);
    auto f = CompressionModulus::power(0.6);
    auto asm1 = assemble_dyadic({{block, curve}}, f, curve, 1, 2.0);
    REQUIRE(asm1.weights.size() == 1);
    double w = asm1.weights[0];
    CHECK(w == doctest::Approx(f.eval(1.0) / curve.at(2)));
    for (int32_t i = 0; i < ball->volume(3); ++i)
        CHECK(asm1.cocycle->norm(ball->element(i), 2.0) ==
              doctest::Approx(w * block->norm(ball->element(i), 2.0)).epsilon(1e-12));
}

TEST_CASE("assemble_dyadic validates the block precondition") {
    auto ZZ = groupOf("ZwrZ");
    auto ball = enumerate_ball(ZZ, 4);
    auto lamp = std::make_shared<LampConfigCocycle>(ZZ);
    auto lampCurve = cocycle_compression(*lamp, *ball, 2.0);  // identically 0
    CompressionCurve M;
    M.rho = {1.0, 1.0, 1.0, 1.0};
    M.lipschitz = 1.0;
    try {
        assemble_dyadic({{lamp, lampCurve}}, CompressionModulus::power(0.6), M, 1, 2.0);
        FAIL("expected UsageError");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("k=0") != std::string::npos);
    }
}

TEST_CASE("zwrz lower bound report") {
    auto ZZ = groupOf("ZwrZ");
    auto ball = enumerate_ball(ZZ, 6);
    auto rep = zwrz_lower_bound(*ball, 2.0);
    CHECK(rep.exponent == doctest::Approx(2.0 / 3.0));
    CHECK(rep.c > 0.0);
    // pure translations satisfy m(g) = |g|
    GroupElement t5 = wreathElem(5, {});
    CHECK(theta_length(t5) == 5);
    // Hoelder sanity instance: u = (3,4), p = 2
    CHECK(7.0 <= 5.0 * std::sqrt(2.0));
    // per-sphere infima are positive
    for (double v : rep.sphereInf) CHECK(v > 0.0);
    // the pointwise certificate is what it claims: every element obeys it
    for (int32_t i = 1; i < ball->size(); ++i) {
        const GroupElement& g = ball->element(i);
        double mTheta = static_cast<double>(theta_length(g));
        KahanSum s;
        for (auto& [site, value] : g.wreath().lamps) s.add(double(value) * value);
        double m = std::max(mTheta, std::sqrt(s.value()));
        CHECK(m >= rep.c * std::pow(double(ball->length(i)), rep.exponent) - 1e-12);
    }
    CHECK_THROWS_AS(zwrz_lower_bound(*enumerate_ball(groupOf("Z"), 3), 2.0), UsageError);
}

TEST_CASE("schoenberg kernel") {
    auto ZZ = groupOf("ZwrZ");
    auto ball = enumerate_ball(ZZ, 8);
    LampConfigCocycle b(ZZ);
    // single point: eigenvalue exactly 1
    auto single = schoenberg_psd_check(b, {ball->element(3)}, 2.0, 2.0);
    CHECK(single.minEigenvalue == doctest::Approx(1.0));

    auto sample = sample_ball_elements(*ball, 50, 2024);
    for (double t : {1.0, 4.0, 16.0}) {
        auto rep = schoenberg_psd_check(b, sample, t, 2.0);
        CHECK(rep.minEigenvalue >= -1e-8 * rep.normK);
    }
    // t -> infinity: the all-ones matrix, min eigenvalue -> 0
    auto big = schoenberg_psd_check(b, sample, 1e9, 2.0);
    CHECK(std::fabs(big.minEigenvalue) <= 1e-8 * big.normK + 1e-12);
    CHECK(big.normK == doctest::Approx(50.0).epsilon(1e-6));

    CHECK_THROWS_AS(schoenberg_psd_check(b, sample, 1.0, 3.0), UsageError);
}

TEST_CASE("zero cocycle has the zero curve") {
    auto ZZ = groupOf("ZwrZ");
    auto ball = enumerate_ball(ZZ, 5);
    auto lamp = std::make_shared<LampConfigCocycle>(ZZ);
    ScaledSumCocycle zero({{0.0, lamp}});
    auto curve = cocycle_compression(zero, *ball, 2.0);
    for (int t = 1; t <= 5; ++t) CHECK(curve.at(t) == 0.0);
}

TEST_CASE("variational compression equals Var_p on Z (cross-module oracle)") {
    auto Z = groupOf("Z");
    auto ball = enumerate_ball(Z, 30);
    GroupFunction phi = GroupFunction::ballIndicator(ball, 4);  // support radius 4
    VariationalCocycle b(phi);
    auto inner = enumerate_ball(Z, 25);
    auto curve = cocycle_compression(b, *inner, 1.0);
    // the stabilized tail makes variation() equal to the enumerated infimum
    for (int t = 1; t <= 12; ++t)
        CHECK(curve.at(t) == doctest::Approx(variation(phi, t, 1.0)).epsilon(1e-12));
}

TEST_CASE("out-of-ball variational evaluation raises a resource error") {
    auto C2 = groupOf("C2wrZ");
    auto ball = enumerate_ball(C2, 3);
    VariationalCocycle b(coneFunction(ball, 2));
    // an element of length 3 translates the support outside radius 3
    GroupElement far = wreathElem(3, {});
    CHECK_THROWS_AS(b.evaluate(far), ResourceError);
}
