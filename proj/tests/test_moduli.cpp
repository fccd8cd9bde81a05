#include "doctest.h"
#include "isocomp/moduli.hpp"

#include <cmath>

using namespace isocomp;

TEST_CASE("the four reference classifications at p = 2") {
    CHECK(check_Cp(CompressionModulus::power(0.9), 2).verdict == CpVerdict::Converges);
    CHECK(check_Cp(CompressionModulus::power(1.0), 2).verdict == CpVerdict::Diverges);
    CHECK(check_Cp(CompressionModulus::powerLog(1.0, 0.5), 2).verdict == CpVerdict::Diverges);
    CHECK(check_Cp(CompressionModulus::powerLogLog(1.0, 0.5, 1.0), 2).verdict ==
          CpVerdict::Converges);
}

TEST_CASE("power moduli across p") {
    CHECK(check_Cp(CompressionModulus::power(0.5), 1).verdict == CpVerdict::Converges);
    CHECK(check_Cp(CompressionModulus::power(1.2), 3).verdict == CpVerdict::Diverges);
    // borderline log exponent: bp = 2 > 1 converges; bp = 1 with no loglog diverges
    CHECK(check_Cp(CompressionModulus::powerLog(1.0, 1.0), 2).verdict == CpVerdict::Converges);
    CHECK(check_Cp(CompressionModulus::powerLog(1.0, 1.0), 1).verdict == CpVerdict::Diverges);
}

TEST_CASE("partial integral values are right") {
    // integral of t^(-0.2)/t dt from 1 to infinity = 5
    auto rep = check_Cp(CompressionModulus::power(0.9), 2);
    CHECK(rep.partialIntegral + rep.tailEstimate == doctest::Approx(5.0).epsilon(1e-6));
    // identity curve: partial to 2^40 is 40 log 2
    auto div = check_Cp(CompressionModulus::power(1.0), 2);
    CHECK(div.partialIntegral == doctest::Approx(40 * std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("monotonicity is enforced") {
    CHECK_THROWS_AS(check_Cp(CompressionModulus::power(-0.5), 2), UsageError);
    CHECK_FALSE(CompressionModulus::powerLog(0.0, 1.0).isNondecreasing());
    CHECK_THROWS_AS(check_Cp(CompressionModulus::powerLog(0.0, 1.0), 2), UsageError);
    CHECK(CompressionModulus::powerLog(1.0, 0.5).isNondecreasing());
    // a raw dip after t = 1 is ironed out by the hull, not refused
    auto f = CompressionModulus::powerLogLog(1.0, 0.5, 1.0);
    CHECK(f.isNondecreasing());
    CHECK(f.eval(1.5) == f.eval(1.0));  // still on the hull plateau
    double prev = 0;
    for (double t = 1; t < 100; t += 0.5) {
        CHECK(f.eval(t) >= prev);
        prev = f.eval(t);
    }
    // decreasing step knots are caught by the grid check
    auto bad = CompressionModulus::lacunar({1.0, 4.0}, {2.0, 1.0});
    CHECK_FALSE(bad.isNondecreasing());
}

TEST_CASE("evaluation and parsing") {
    auto f = CompressionModulus::parse("pow:0.7");
    CHECK(f.eval(8.0) == doctest::Approx(std::pow(8.0, 0.7)));
    CHECK_THROWS_AS(f.eval(0.5), UsageError);
    CHECK(CompressionModulus::parse("lin").eval(7.0) == 7.0);
    CHECK(CompressionModulus::parse("zero").eval(100.0) == 0.0);
    auto g = CompressionModulus::parse("powlog:1:0.5");
    CHECK(g.eval(std::exp(1.0)) == doctest::Approx(std::exp(1.0) / std::sqrt(2.0)));
    CHECK_THROWS_AS(CompressionModulus::parse("pow"), UsageError);
    CHECK_THROWS_AS(CompressionModulus::parse("nope:1"), UsageError);
    CHECK(CompressionModulus::parse("powloglog:1:0.5:1").str() == "powloglog:1:0.5:1");
}

TEST_CASE("lacunar construction touches h and passes the classifier") {
    auto h = CompressionModulus::powerLog(1.0, 1.0);  // t/(1+log t), sublinear
    auto res = lacunar_modulus(h, 2.0);
    REQUIRE(res.breakpoints.size() >= 4);
    for (double t : res.breakpoints)
        CHECK(res.f.eval(t) == doctest::Approx(res.c * h.eval(t)).epsilon(1e-12));
    auto rep = check_Cp(res.f, 2.0);
    CHECK(rep.verdict == CpVerdict::Converges);
    // the proof's estimate: integral <= (p+1) sum (h(n_i)/n_i)^p
    CHECK(rep.partialIntegral + rep.tailEstimate <= (2.0 + 1) * res.seriesSum + 1e-9);
}

TEST_CASE("lacunar with constant h is h itself") {
    auto h = CompressionModulus::tabulated({1.0, 2.0}, {3.0, 3.0});
    auto res = lacunar_modulus(h, 2.0);
    for (double t : {1.0, 10.0, 1000.0}) CHECK(res.f.eval(t) == 3.0);
    CHECK(check_Cp(res.f, 2.0).verdict == CpVerdict::Converges);
}

TEST_CASE("lacunar at p = 1 forces sparser breakpoints but still sums") {
    auto h = CompressionModulus::powerLog(1.0, 1.0);
    auto res = lacunar_modulus(h, 1.0);
    CHECK(check_Cp(res.f, 1.0).verdict == CpVerdict::Converges);
    CHECK(res.seriesSum < 1e10);
    // breakpoints grow faster than dyadically somewhere
    bool sparser = false;
    for (size_t i = 0; i + 1 < res.breakpoints.size(); ++i)
        if (res.breakpoints[i + 1] > 2.5 * res.breakpoints[i]) sparser = true;
    CHECK(sparser);
}

TEST_CASE("non-sublinear h is refused, sublinear power is accepted") {
    CHECK_THROWS_AS(lacunar_modulus(CompressionModulus::power(1.0), 2.0), UsageError);
    auto res = lacunar_modulus(CompressionModulus::power(0.5), 2.0);
    CHECK(check_Cp(res.f, 2.0).verdict == CpVerdict::Converges);
}

TEST_CASE("tabulated moduli report inconclusive") {
    auto f = CompressionModulus::tabulated({1.0, 10.0, 100.0}, {1.0, 2.0, 3.0});
    CHECK(check_Cp(f, 2.0).verdict == CpVerdict::Inconclusive);
}
