#include "doctest.h"
#include "isocomp/groups.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace isocomp;

namespace {

std::shared_ptr<const MarkedGroup> make(const std::string& spec) {
    return std::make_shared<const MarkedGroup>(MarkedGroup::parse(spec));
}

GroupElement wreathElem(int64_t shift, std::vector<std::pair<int32_t, int32_t>> lamps) {
    return GroupElement{WreathData{shift, std::move(lamps)}};
}

GroupElement zElem(int64_t v) { return GroupElement{IntVec{v}}; }

}  // namespace

TEST_CASE("Z multiplication and inverses") {
    auto G = make("Z");
    CHECK(G->multiply(zElem(3), zElem(-3)) == zElem(0));
    CHECK(G->isIdentity(G->multiply(zElem(5), G->inverse(zElem(5)))));
}

TEST_CASE("wreath group law") {
    auto C2 = make("C2wrZ");
    // (1, delta_0) (-1, 0) = (0, delta_1): tau_{-1} delta_0 = delta_1
    CHECK(C2->multiply(wreathElem(1, {{0, 1}}), wreathElem(-1, {})) == wreathElem(0, {{1, 1}}));
    // lamps at the same site cancel mod 2
    CHECK(C2->isIdentity(C2->multiply(wreathElem(0, {{3, 1}}), wreathElem(0, {{3, 1}}))));

    auto ZZ = make("ZwrZ");
    CHECK(ZZ->multiply(wreathElem(0, {{0, 2}}), wreathElem(0, {{0, 3}})) ==
          wreathElem(0, {{0, 5}}));
    // inverse round trip on a handful of elements
    for (auto g : {wreathElem(3, {{-1, 2}, {4, -7}}), wreathElem(-2, {{0, 1}}), wreathElem(0, {})})
        CHECK(ZZ->isIdentity(ZZ->multiply(g, ZZ->inverse(g))));
}

TEST_CASE("associativity on random wreath elements") {
    auto ZZ = make("ZwrZ");
    Rng rng(7);
    auto randomElem = [&] {
        WreathData w;
        w.shift = static_cast<int64_t>(rng.nextBelow(9)) - 4;
        for (int i = 0; i < 3; ++i) {
            int32_t site = static_cast<int32_t>(rng.nextBelow(7)) - 3;
            int32_t val = static_cast<int32_t>(rng.nextBelow(5)) - 2;
            if (val != 0) w.lamps.emplace_back(site, val);
        }
        std::sort(w.lamps.begin(), w.lamps.end());
        w.lamps.erase(std::unique(w.lamps.begin(), w.lamps.end(),
                                  [](auto& a, auto& b) { return a.first == b.first; }),
                      w.lamps.end());
        return GroupElement{w};
    };
    for (int i = 0; i < 200; ++i) {
        GroupElement a = randomElem(), b = randomElem(), c = randomElem();
        CHECK(ZZ->multiply(ZZ->multiply(a, b), c) == ZZ->multiply(a, ZZ->multiply(b, c)));
    }
}

TEST_CASE("mixed operands are refused") {
    auto Z = make("Z");
    CHECK_THROWS_AS(Z->multiply(zElem(1), GroupElement{IntVec{1, 2}}), UsageError);
    CHECK_THROWS_AS(Z->multiply(zElem(1), wreathElem(0, {})), UsageError);
}

TEST_CASE("free group reduction and growth") {
    auto F2 = make("F2");
    GroupElement a{FreeWordLetters{1}}, binv{FreeWordLetters{-2}};
    GroupElement ab = F2->multiply(a, GroupElement{FreeWordLetters{2}});
    CHECK(F2->toString(ab) == "ab");
    CHECK(F2->isIdentity(F2->multiply(ab, F2->inverse(ab))));
    CHECK(F2->toString(F2->inverse(ab)) == "BA");
    CHECK(F2->toString(binv) == "B");

    auto ball = enumerate_ball(F2, 7);
    for (int n = 0; n <= 7; ++n)
        CHECK(ball->volume(n) == 2 * static_cast<int64_t>(std::pow(3, n)) - 1);
}

TEST_CASE("word length: examples and BFS") {
    auto Z = make("Z");
    CHECK(Z->wordLengthBfs(Z->identity(), 5) == 0);
    CHECK(Z->wordLengthBfs(zElem(5), 10) == 5);
    CHECK_FALSE(Z->wordLengthBfs(zElem(5), 4).has_value());

    auto C2 = make("C2wrZ");
    CHECK(C2->wordLengthBfs(wreathElem(0, {{1, 1}}), 10) == 3);  // a conjugated by t
    CHECK(C2->wordLengthParry(wreathElem(0, {{1, 1}})) == 3);
    CHECK(C2->wordLengthParry(wreathElem(-4, {})) == 4);

    auto ZZ = make("ZwrZ");
    CHECK(ZZ->wordLengthParry(wreathElem(0, {{0, 5}})) == 5);
    CHECK(ZZ->wordLengthParry(wreathElem(7, {})) == 7);
    CHECK_THROWS_AS(Z->wordLengthParry(zElem(2)), UsageError);
}

TEST_CASE("Parry length equals BFS on wreath balls (oracle)") {
    for (const char* spec : {"C2wrZ", "ZwrZ", "C3wrZ"}) {
        auto G = make(spec);
        auto oracle = oracles::bfsLengths(*G, 6);
        auto ball = enumerate_ball(G, 6);
        REQUIRE(ball->size() == static_cast<int64_t>(oracle.size()));
        for (int32_t i = 0; i < ball->size(); ++i) {
            const GroupElement& g = ball->element(i);
            CHECK(oracle.at(G->encode(g)) == ball->length(i));
            CHECK(G->wordLengthParry(g) == ball->length(i));
        }
    }
}

TEST_CASE("ball enumeration basics") {
    auto Z = make("Z");
    auto b3 = enumerate_ball(Z, 3);
    CHECK(b3->size() == 7);
    CHECK(b3->length(0) == 0);
    for (int n = 1; n <= 3; ++n) CHECK(b3->sphereSize(n) == 2);

    auto C2 = make("C2wrZ");
    CHECK(enumerate_ball(C2, 1)->size() == 4);  // e, t, t^-1, a
    auto oracle = oracles::bfsLengths(*C2, 4);
    CHECK(enumerate_ball(C2, 4)->size() == static_cast<int64_t>(oracle.size()));
}

TEST_CASE("ball lengths are BFS distances and tables are consistent") {
    auto ZZ = make("ZwrZ");
    auto ball = enumerate_ball(ZZ, 5);
    const auto& G = ball->group();
    for (int32_t i = 1; i < ball->size(); ++i) CHECK(ball->length(i) >= ball->length(i - 1));
    for (int32_t i = 0; i < ball->size(); ++i) {
        for (size_t j = 0; j < G.numGenerators(); ++j) {
            int32_t k = ball->leftMul(i, static_cast<int>(j));
            GroupElement prod = G.multiply(G.generators()[j], ball->element(i));
            if (k == Ball::kOutside) {
                CHECK(ball->find(prod) == Ball::kOutside);
            } else {
                CHECK(ball->element(k) == prod);
            }
        }
    }
}

TEST_CASE("inverse length symmetry and triangle inequality") {
    auto C2 = make("C2wrZ");
    auto ball = enumerate_ball(C2, 6);
    const auto& G = ball->group();
    for (int32_t i = 0; i < ball->size(); ++i) {
        int32_t inv = ball->find(G.inverse(ball->element(i)));
        REQUIRE(inv != Ball::kOutside);
        CHECK(ball->length(inv) == ball->length(i));
    }
    Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        int32_t i = static_cast<int32_t>(rng.nextBelow(ball->size()));
        int32_t j = static_cast<int32_t>(rng.nextBelow(ball->size()));
        GroupElement prod = G.multiply(ball->element(i), ball->element(j));
        auto len = G.wordLengthBfs(prod, 12);
        REQUIRE(len.has_value());
        CHECK(*len <= ball->length(i) + ball->length(j));
    }
}

TEST_CASE("theta projection") {
    auto ZZ = make("ZwrZ");
    auto C2 = make("C2wrZ");
    CHECK(project_theta(wreathElem(0, {{0, 2}})) == wreathElem(0, {}));
    CHECK(project_theta(wreathElem(3, {{1, 5}})) == wreathElem(3, {{1, 1}}));
    auto ball = enumerate_ball(ZZ, 4);
    Rng rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        const GroupElement& g = ball->element(static_cast<int32_t>(rng.nextBelow(ball->size())));
        const GroupElement& h = ball->element(static_cast<int32_t>(rng.nextBelow(ball->size())));
        CHECK(project_theta(ZZ->multiply(g, h)) ==
              C2->multiply(project_theta(g), project_theta(h)));
        CHECK(theta_length(g) == C2->wordLengthParry(project_theta(g)));
    }
}

TEST_CASE("budget and determinism") {
    auto ZZ = make("ZwrZ");
    CHECK_THROWS_AS(enumerate_ball(ZZ, 8, 100), ResourceError);
    try {
        enumerate_ball(ZZ, 8, 100);
    } catch (const ResourceError& e) {
        CHECK(std::string(e.what()).find("attained radius") != std::string::npos);
    }
    auto b1 = enumerate_ball(ZZ, 4);
    auto b2 = enumerate_ball(ZZ, 4);
    REQUIRE(b1->size() == b2->size());
    for (int32_t i = 0; i < b1->size(); ++i) CHECK(b1->element(i) == b2->element(i));
}

TEST_CASE("group descriptor parsing") {
    CHECK(MarkedGroup::parse("Z").name() == "Z");
    CHECK(MarkedGroup::parse("Z^2").param() == 2);
    CHECK(MarkedGroup::parse("F2").family() == Family::FreeGroup);
    CHECK(MarkedGroup::parse("C2wrZ").param() == 2);
    CHECK(MarkedGroup::parse("C3wrZ").param() == 3);
    CHECK(MarkedGroup::parse("ZwrZ").family() == Family::WreathZOverZ);
    CHECK_THROWS_AS(MarkedGroup::parse("Q"), UsageError);
    CHECK_THROWS_AS(MarkedGroup::parse("Z^x"), UsageError);
}

TEST_CASE("ball CSV dump") {
    auto Z = make("Z");
    std::string csv = ball_to_csv(*enumerate_ball(Z, 3));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);  // header + 7 rows
    CHECK(csv.find("0,0,0") != std::string::npos);
}

TEST_CASE("Z^2 ball volumes") {
    auto Z2 = make("Z^2");
    auto ball = enumerate_ball(Z2, 5);
    // V(n) = 2n^2 + 2n + 1 for the l^1 ball
    for (int n = 0; n <= 5; ++n) CHECK(ball->volume(n) == 2 * n * n + 2 * n + 1);
}
