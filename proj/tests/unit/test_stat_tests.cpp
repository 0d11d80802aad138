#include <doctest.h>

#include <cmath>

#include "tandem/distributions.hpp"
#include "tandem/error.hpp"
#include "tandem/rng.hpp"
#include "tandem/stat_tests.hpp"

using namespace tandem;

namespace {

std::vector<double> seeded_normals(std::uint64_t seed, std::size_t n, double mean, double sd) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = mean + sd * rng.normal();
    return out;
}

}  // namespace

TEST_CASE("distribution tails against closed forms") {
    // chi-square with 1 dof is the square of a standard normal:
    // P(X > x) = erfc(sqrt(x / 2)).
    for (double x : {0.05, 0.5, 1.0, 2.5, 4.05, 9.0, 20.0})
        CHECK(dist::chi2_sf(x, 1.0) ==
              doctest::Approx(std::erfc(std::sqrt(x / 2.0))).epsilon(1e-10));

    // chi-square with 2 dof: P(X > x) = exp(-x / 2).
    for (double x : {0.1, 1.0, 3.0, 8.0})
        CHECK(dist::chi2_sf(x, 2.0) == doctest::Approx(std::exp(-x / 2.0)).epsilon(1e-12));

    // t with 1 dof is Cauchy: two-sided p = 1 - (2/pi) atan(|t|).
    for (double t : {0.3, 1.0, 2.0, 7.5})
        CHECK(dist::t_two_sided_p(t, 1.0) ==
              doctest::Approx(1.0 - 2.0 / M_PI * std::atan(t)).epsilon(1e-12));

    // t with 2 dof: two-sided p = 1 - |t| / sqrt(2 + t^2).
    for (double t : {0.5, 1.5, 3.0})
        CHECK(dist::t_two_sided_p(t, 2.0) ==
              doctest::Approx(1.0 - t / std::sqrt(2.0 + t * t)).epsilon(1e-12));

    // T^2 ~ F(1, d): the F upper tail at t^2 equals the two-sided t p-value.
    for (double t : {0.7, 1.3, 2.9})
        for (double d : {3.0, 10.0, 44.0})
            CHECK(dist::f_sf(t * t, 1.0, d) ==
                  doctest::Approx(dist::t_two_sided_p(t, d)).epsilon(1e-12));

    // Regularized incomplete gamma/beta identities on a fixed grid.
    for (double x : {0.01, 0.2, 0.5, 0.9, 2.0})
        CHECK(dist::reg_gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-12));
    for (double x : {0.05, 0.3, 0.6, 0.95})
        for (double a : {0.5, 2.0, 7.5})
            for (double b : {0.5, 1.0, 4.0})
                CHECK(dist::reg_beta(x, a, b) ==
                      doctest::Approx(1.0 - dist::reg_beta(1.0 - x, b, a)).epsilon(1e-10));
}

TEST_CASE("mcnemar chi-square statistics") {
    const AgreementTable t{10, 5, 15, 10};
    const auto off = mcnemar_test(t, McNemarVariant::chisquare, false);
    CHECK(*off.statistic == doctest::Approx(5.0));  // (5-15)^2 / 20
    const auto on = mcnemar_test(t, McNemarVariant::chisquare, true);
    CHECK(*on.statistic == doctest::Approx(4.05));  // (|5-15|-1)^2 / 20
    CHECK(on.p_value == doctest::Approx(std::erfc(std::sqrt(4.05 / 2.0))).epsilon(1e-10));
}

TEST_CASE("mcnemar exact binomial") {
    // b=2, c=8: p = 2 * (C(10,0) + C(10,1) + C(10,2)) / 2^10 = 112/1024
    const auto r = mcnemar_test({0, 2, 8, 0}, McNemarVariant::binomial);
    CHECK(r.p_value == doctest::Approx(0.109375).epsilon(1e-9));
    CHECK_FALSE(r.statistic.has_value());

    // b equal to c saturates at 1 under the doubling definition.
    CHECK(mcnemar_test({0, 6, 6, 0}, McNemarVariant::binomial).p_value == 1.0);
}

TEST_CASE("mcnemar degenerate table") {
    CHECK_THROWS_WITH_AS(mcnemar_test({5, 0, 0, 5}, McNemarVariant::binomial),
                         doctest::Contains("no discordant"), Error);
    CHECK_THROWS_AS(mcnemar_test({5, 0, 0, 5}, McNemarVariant::chisquare), Error);
}

TEST_CASE("mcnemar properties on random tables") {
    Rng rng(4242);
    for (int trial = 0; trial < 120; ++trial) {
        AgreementTable t;
        t.a = static_cast<std::int64_t>(rng.below(30));
        t.d = static_cast<std::int64_t>(rng.below(30));
        t.b = static_cast<std::int64_t>(rng.below(25));
        t.c = static_cast<std::int64_t>(rng.below(25));
        if (t.b + t.c == 0) t.b = 1;

        const AgreementTable swapped{t.a, t.c, t.b, t.d};
        for (auto variant : {McNemarVariant::binomial, McNemarVariant::chisquare}) {
            const auto p1 = mcnemar_test(t, variant).p_value;
            const auto p2 = mcnemar_test(swapped, variant).p_value;
            CHECK(p1 == doctest::Approx(p2).epsilon(1e-12));
            CHECK(p1 >= 0.0);
            CHECK(p1 <= 1.0);
        }
    }

    // Exact p is monotone non-increasing in |b - c| at fixed b + c.
    for (std::int64_t total : {9, 20, 41}) {
        double prev = 2.0;
        for (std::int64_t b = (total + 1) / 2; b <= total; ++b) {
            const double p =
                mcnemar_test({0, b, total - b, 0}, McNemarVariant::binomial).p_value;
            CHECK(p <= prev + 1e-12);
            prev = p;
        }
    }
}

TEST_CASE("chi-square and exact binomial agree asymptotically") {
    // The doubled exact p saturates at 1 when b = c; skip that center point
    // where the continuity-corrected approximation cannot follow.
    Rng rng(777);
    for (int trial = 0; trial < 100; ++trial) {
        const std::int64_t total = 40 + static_cast<std::int64_t>(rng.below(160));
        std::int64_t b = static_cast<std::int64_t>(rng.below(static_cast<std::size_t>(total)));
        if (b == total - b) ++b;
        const AgreementTable t{0, b, total - b, 0};
        const double exact = mcnemar_test(t, McNemarVariant::binomial).p_value;
        const double chi = mcnemar_test(t, McNemarVariant::chisquare, true).p_value;
        CHECK(std::abs(exact - chi) < 0.02);
    }
}

TEST_CASE("levene test") {
    SUBCASE("permutation of the same sample gives statistic 0, p 1") {
        const std::vector<double> x{1.0, 3.0, 2.0, 8.0, 5.0};
        const std::vector<double> y{8.0, 1.0, 5.0, 2.0, 3.0};
        const auto r = levene_test(x, y);
        CHECK(*r.statistic == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(r.p_value == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("spread 1 vs spread 4 is detected") {
        const auto x = seeded_normals(11, 50, 0.0, 1.0);
        const auto y = seeded_normals(12, 50, 0.0, 4.0);
        CHECK(levene_test(x, y).p_value < 0.05);
    }
    SUBCASE("equal spreads are not flagged") {
        const auto x = seeded_normals(21, 50, 0.0, 1.0);
        const auto y = seeded_normals(22, 50, 0.0, 1.0);
        CHECK(levene_test(x, y).p_value > 0.05);
    }
    SUBCASE("degenerate inputs error") {
        CHECK_THROWS_AS(levene_test({1.0}, {1, 2, 3}), Error);
        CHECK_THROWS_AS(levene_test({2, 2, 2}, {5, 5, 5}), Error);
    }
}

TEST_CASE("two-sample t with automatic variant selection") {
    SUBCASE("identical samples: t 0, p 1, student branch") {
        const std::vector<double> x{1, 2, 3, 4};
        const auto r = two_sample_t(x, x);
        CHECK(*r.statistic == 0.0);
        CHECK(r.p_value == 1.0);
        CHECK(*r.variant_chosen == TVariant::student);
    }
    SUBCASE("shifted sample: closed-form pooled t") {
        const std::vector<double> x{1, 2, 3, 4};
        const std::vector<double> y{11, 12, 13, 14};
        // vx = vy = 5/3, pooled se = sqrt(5/3 * 1/2), t = -10 / se
        const double se = std::sqrt(5.0 / 3.0 * 0.5);
        const auto r = two_sample_t(x, y);
        CHECK(*r.variant_chosen == TVariant::student);
        CHECK(*r.statistic == doctest::Approx(-10.0 / se).epsilon(1e-12));
        CHECK(r.p_value < 0.01);
    }
    SUBCASE("ratio-16 variances route to welch") {
        const auto x = seeded_normals(31, 50, 0.0, 1.0);
        const auto y = seeded_normals(32, 50, 0.0, 4.0);
        const auto r = two_sample_t(x, y);
        CHECK(*r.variant_chosen == TVariant::welch);
    }
    SUBCASE("antisymmetric statistic, symmetric p") {
        const auto x = seeded_normals(41, 30, 0.0, 1.0);
        const auto y = seeded_normals(42, 35, 0.4, 1.2);
        const auto ab = two_sample_t(x, y);
        const auto ba = two_sample_t(y, x);
        CHECK(*ab.statistic == doctest::Approx(-*ba.statistic).epsilon(1e-12));
        CHECK(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-12));
        CHECK(*ab.variant_chosen == *ba.variant_chosen);
    }
    SUBCASE("zero pooled variance with unequal means errors") {
        CHECK_THROWS_AS(two_sample_t({2, 2, 2}, {3, 3, 3}), Error);
    }
}

TEST_CASE("mcnemar_table matches agreement_table") {
    const std::vector<double> a{1, 1, 0, 0, 1};
    const std::vector<double> b{1, 0, 1, 0, 1};
    CHECK(mcnemar_table(a, b) == agreement_table(a, b));
    Rng rng(3);
    std::vector<double> pa(30), pb(30);
    for (std::size_t i = 0; i < 30; ++i) {
        pa[i] = static_cast<double>(rng.below(2));
        pb[i] = static_cast<double>(rng.below(2));
    }
    CHECK(mcnemar_table(pa, pb).n() == 30);
}
