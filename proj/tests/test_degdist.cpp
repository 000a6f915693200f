#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/zeta.hpp>
#include <array>
#include <cmath>
#include <numeric>

#include "sparse_rank/degdist.hpp"
#include "sparse_rank/error.hpp"

using namespace sparse_rank;

namespace {

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::BadInput;
}

}  // namespace

TEST_CASE("fixed and table") {
    const auto f = DegreeDist::fixed(3);
    REQUIRE(f.atoms().size() == 1);
    CHECK(f.atoms()[0] == Atom{3, 1.0});
    CHECK(f.mean() == 3.0);
    CHECK(f.pgf(0.5) == doctest::Approx(0.125).epsilon(1e-15));

    const auto t = DegreeDist::table({{4, 0.5}, {3, 0.5}});
    CHECK(t.min_value() == 3);
    CHECK(t.max_value() == 4);
    CHECK(std::abs(t.pgf(0.5) - 0.09375) < 1e-15);
    CHECK(std::abs(t.pgf_d1(1.0) - t.mean()) < 1e-14);
    CHECK(std::abs(t.pgf_d2(1.0) - (t.second_moment() - t.mean())) < 1e-13);
    CHECK(t.tail_mass_dropped() == 0.0);
}

TEST_CASE("size-biased law") {
    const auto s = DegreeDist::table({{1, 0.5}, {3, 0.5}}).size_biased();
    REQUIRE(s.atoms().size() == 2);
    CHECK(s.atoms()[0].value == 1);
    CHECK(std::abs(s.atoms()[0].prob - 0.25) < 1e-15);
    CHECK(s.atoms()[1].value == 3);
    CHECK(std::abs(s.atoms()[1].prob - 0.75) < 1e-15);
    CHECK(code_of([] { (void)DegreeDist::fixed(0).size_biased(); }) == ErrorCode::BadParameter);
}

TEST_CASE("gcd of the support") {
    CHECK(DegreeDist::table({{6, 0.5}, {9, 0.5}}).gcd_support() == 3);
    CHECK(DegreeDist::fixed(4).gcd_support() == 4);
    CHECK(DegreeDist::table({{4, 0.5}, {6, 0.25}, {9, 0.25}}).gcd_support() == 1);
    CHECK(DegreeDist::poisson(2.0).gcd_support() == 1);
}

TEST_CASE("poisson generating function") {
    const double lambda = 6.5;
    const auto d = DegreeDist::poisson(lambda);
    CHECK(d.min_value() == 0);
    CHECK(d.tail_mass_dropped() < 1e-12);
    CHECK(std::abs(d.mean() - lambda) < 1e-9);
    for (int i = 0; i <= 100; ++i) {
        const double z = i / 100.0;
        CHECK(std::abs(d.pgf(z) - std::exp(lambda * (z - 1.0))) < 1e-9);
        CHECK(std::abs(d.pgf_d1(z) - lambda * std::exp(lambda * (z - 1.0))) < 1e-8);
    }
}

TEST_CASE("power law against a direct zeta-normalised sum") {
    for (auto [alpha, kmin] : {std::pair{3.5, 1}, {4.0, 3}, {3.2, 2}}) {
        CAPTURE(alpha);
        const auto d = DegreeDist::powerlaw(alpha, kmin);
        CHECK(d.min_value() == kmin);
        CHECK(d.tail_mass_dropped() < 1e-12);
        double norm = boost::math::zeta(alpha);
        for (int l = 1; l < kmin; ++l) norm -= std::pow(l, -alpha);
        double mean = boost::math::zeta(alpha - 1.0);
        for (int l = 1; l < kmin; ++l) mean -= std::pow(l, 1.0 - alpha);
        mean /= norm;
        // the truncated tail carries mean mass of order cutoff^(2 - alpha)
        CHECK(std::abs(d.mean() - mean) < 1e-4);
        for (double z : {0.0, 0.25, 0.5, 0.9, 0.99}) {
            double direct = 0.0;
            double zp = std::pow(z, kmin);
            for (int l = kmin; l < 2000 && zp > 1e-300; ++l, zp *= z) direct += zp * std::pow(l, -alpha);
            CHECK(std::abs(d.pgf(z) - direct / norm) < 1e-9);
        }
        CHECK(std::abs(d.pgf(1.0) - 1.0) < 1e-12);
    }
}

TEST_CASE("probabilities are a distribution and pgf is monotone") {
    for (const auto& d : {DegreeDist::poisson(2.9), DegreeDist::powerlaw(3.5, 1),
                          DegreeDist::table({{3, 0.2}, {5, 0.3}, {8, 0.5}})}) {
        double total = 0.0;
        int prev = -1;
        for (const auto& a : d.atoms()) {
            CHECK(a.prob > 0.0);
            CHECK(a.value > prev);
            prev = a.value;
            total += a.prob;
        }
        CHECK(std::abs(total - 1.0) < 1e-12);
        double last = -1.0;
        for (int i = 0; i <= 200; ++i) {
            const double v = d.pgf(i / 200.0);
            CHECK(v >= last);
            last = v;
        }
    }
}

TEST_CASE("sampling matches the law") {
    const auto d = DegreeDist::table({{3, 0.2}, {5, 0.3}, {8, 0.5}});
    Rng rng(7);
    const int draws = 200000;
    std::array<int, 9> counts{};
    for (int i = 0; i < draws; ++i) ++counts[d.sample(rng)];
    for (const auto& a : d.atoms()) {
        const double expected = a.prob * draws;
        CHECK(std::abs(counts[a.value] - expected) < 5.0 * std::sqrt(expected * (1.0 - a.prob)));
    }
    const auto p = DegreeDist::poisson(2.5);
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) sum += p.sample(rng);
    CHECK(std::abs(sum / draws - 2.5) < 5.0 * std::sqrt(2.5 / draws));
}

TEST_CASE("parameter errors") {
    CHECK(code_of([] { (void)DegreeDist::poisson(-1.0); }) == ErrorCode::BadParameter);
    CHECK(code_of([] { (void)DegreeDist::powerlaw(3.0, 1); }) == ErrorCode::BadParameter);
    CHECK(code_of([] { (void)DegreeDist::powerlaw(3.5, 0); }) == ErrorCode::BadParameter);
    CHECK(code_of([] { (void)DegreeDist::poisson(2.0, 1e-7); }) == ErrorCode::BadParameter);
    CHECK(code_of([] { (void)DegreeDist::table({{3, 0.5}, {4, 0.4}}); }) == ErrorCode::BadParameter);
    CHECK(code_of([] { (void)DegreeDist::table({{3, 1.0}, {4, 0.0}}); }) == ErrorCode::BadParameter);
    CHECK(code_of([] { (void)DegreeDist::table({{-1, 1.0}}); }) == ErrorCode::BadParameter);
    CHECK(code_of([] { (void)DegreeDist::fixed(-2); }) == ErrorCode::BadParameter);
    const auto d = DegreeDist::fixed(3);
    CHECK(code_of([&] { (void)d.pgf(1.5); }) == ErrorCode::OutOfDomain);
    CHECK(code_of([&] { (void)d.pgf(-0.1); }) == ErrorCode::OutOfDomain);
}
