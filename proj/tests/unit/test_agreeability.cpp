#include <doctest.h>

#include <cmath>

#include "tandem/agreeability.hpp"
#include "tandem/error.hpp"
#include "tandem/rng.hpp"

using namespace tandem;

namespace {

std::vector<double> vector_for_table(const AgreementTable& t, std::vector<double>& other) {
    std::vector<double> first;
    other.clear();
    auto push = [&](double x, double y, std::int64_t count) {
        for (std::int64_t i = 0; i < count; ++i) {
            first.push_back(x);
            other.push_back(y);
        }
    };
    push(1, 1, t.a);
    push(1, 0, t.b);
    push(0, 1, t.c);
    push(0, 0, t.d);
    return first;
}

}  // namespace

TEST_CASE("agreement table counting") {
    SUBCASE("identical vectors, two ones out of four") {
        const std::vector<double> v{1, 0, 1, 0};
        const auto t = agreement_table(v, v);
        CHECK(t.a == 2);
        CHECK(t.d == 2);
        CHECK(t.b == 0);
        CHECK(t.c == 0);
    }
    SUBCASE("complement vectors leave no joint agreement") {
        const std::vector<double> v{1, 0, 1, 1};
        std::vector<double> w(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) w[i] = 1.0 - v[i];
        const auto t = agreement_table(v, w);
        CHECK(t.a == 0);
        CHECK(t.d == 0);
        CHECK(t.b + t.c == 4);
    }
    SUBCASE("clinical counts reconstruct from realizing vectors") {
        std::vector<double> w;
        const auto v = vector_for_table({22, 2, 4, 11}, w);
        const auto t = agreement_table(v, w);
        CHECK(t == AgreementTable{22, 2, 4, 11});
        CHECK(t.n() == 39);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(agreement_table({1, 0}, {1}), Error);
        CHECK_THROWS_AS(agreement_table({}, {}), Error);
        CHECK_THROWS_AS(agreement_table({0.3}, {1}), Error);
    }
}

TEST_CASE("kappa on the worked clinical table") {
    const auto r = cohen_kappa({22, 2, 4, 11});
    CHECK(r.p_o == doctest::Approx(0.8462).epsilon(0.0005));
    CHECK(r.p_e == doctest::Approx(0.5385).epsilon(0.0005));
    CHECK(r.kappa == doctest::Approx(0.67).epsilon(0.0075));  // +/- 0.005 absolute
    CHECK(std::abs(r.kappa - 0.67) < 0.005);
}

TEST_CASE("kappa limits") {
    SUBCASE("perfect agreement with mixed classes") {
        CHECK(cohen_kappa({3, 0, 0, 5}).kappa == 1.0);
    }
    SUBCASE("balanced complete disagreement") {
        const auto r = cohen_kappa({0, 6, 6, 0});
        CHECK(r.p_o == 0.0);
        CHECK(r.p_e == doctest::Approx(0.5));
        CHECK(r.kappa == doctest::Approx(-1.0));
    }
    SUBCASE("identical constant raters define kappa = 1") {
        CHECK(cohen_kappa({7, 0, 0, 0}).kappa == 1.0);
        CHECK(cohen_kappa({0, 0, 0, 9}).kappa == 1.0);
    }
}

TEST_CASE("kappa properties on random tables") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        AgreementTable t;
        t.a = static_cast<std::int64_t>(rng.below(20));
        t.b = static_cast<std::int64_t>(rng.below(20));
        t.c = static_cast<std::int64_t>(rng.below(20));
        t.d = static_cast<std::int64_t>(rng.below(20));
        if (t.n() == 0) t.a = 1;

        const auto r = cohen_kappa(t);
        CHECK(r.kappa <= 1.0);
        CHECK(r.kappa >= -1.0);
        CHECK(r.p_o >= 0.0);
        CHECK(r.p_o <= 1.0);
        CHECK(r.p_e >= 0.0);
        CHECK(r.p_e <= 1.0);

        // Swapping raters only swaps b and c.
        const auto swapped = cohen_kappa({t.a, t.c, t.b, t.d});
        CHECK(r.kappa == doctest::Approx(swapped.kappa).epsilon(1e-12));

        // kappa = 1 exactly when there is no discordance.
        if (t.b == 0 && t.c == 0) CHECK(r.kappa == 1.0);
        if (r.kappa == 1.0) CHECK(t.b + t.c == 0);
    }
}

TEST_CASE("self-agreement is always 1") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng.below(50);
        std::vector<double> v(n);
        for (auto& x : v) x = static_cast<double>(rng.below(2));
        CHECK(cohen_kappa(agreement_table(v, v)).kappa == 1.0);
    }
}

TEST_CASE("pearson correlation") {
    SUBCASE("exact relationships") {
        const std::vector<double> x{1, 2, 3, 5};
        std::vector<double> neg(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
        CHECK(pearson_rho(x, x) == doctest::Approx(1.0));
        CHECK(pearson_rho(x, neg) == doctest::Approx(-1.0));
    }
    SUBCASE("direct formula value") {
        // x=[1,2,3], y=[2,4,5]: cov = 3, sx^2 = 2, sy^2 = 42/9
        // rho = 3 / sqrt(2 * 42/9) = 9/sqrt(84) = 0.981980...
        CHECK(pearson_rho({1, 2, 3}, {2, 4, 5}) ==
              doctest::Approx(9.0 / std::sqrt(84.0)).epsilon(1e-10));
        CHECK(std::abs(pearson_rho({1, 2, 3}, {2, 4, 5}) - 0.9820) < 1e-4);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(pearson_rho({1.0}, {2.0}), Error);
        CHECK_THROWS_AS(pearson_rho({1, 1, 1}, {1, 2, 3}), Error);
        CHECK_THROWS_AS(pearson_rho({1, 2}, {1, 2, 3}), Error);
    }
    SUBCASE("invariant under positive affine transform") {
        Rng rng(17);
        std::vector<double> x(25), y(25);
        for (std::size_t i = 0; i < 25; ++i) {
            x[i] = rng.normal();
            y[i] = rng.normal();
        }
        const double base = pearson_rho(x, y);
        std::vector<double> ax(25);
        for (std::size_t i = 0; i < 25; ++i) ax[i] = 2.5 * x[i] + 7.0;
        CHECK(pearson_rho(ax, y) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("kappa interpretation bands") {
    CHECK(interpret_kappa(0.67) == KappaBand::substantial);
    CHECK(interpret_kappa(-0.1) == KappaBand::none);
    // Rounded to two decimals before the lookup: 0.205 -> 0.21 -> fair.
    CHECK(interpret_kappa(0.205) == KappaBand::fair);

    // Explicit interval-table oracle over the cut points.
    struct Probe {
        double k;
        KappaBand band;
    };
    const Probe probes[] = {
        {-0.01, KappaBand::none},        {0.0, KappaBand::slight},
        {0.20, KappaBand::slight},       {0.21, KappaBand::fair},
        {0.40, KappaBand::fair},         {0.41, KappaBand::moderate},
        {0.60, KappaBand::moderate},     {0.61, KappaBand::substantial},
        {0.80, KappaBand::substantial},  {0.81, KappaBand::almost_perfect},
        {1.00, KappaBand::almost_perfect}};
    for (const auto& p : probes) CHECK(interpret_kappa(p.k) == p.band);

    CHECK_THROWS_AS(interpret_kappa(1.01), Error);
    CHECK_THROWS_AS(interpret_kappa(std::nan("")), Error);
}

TEST_CASE("metric dispatch and names") {
    CHECK(agree_metric_from_string("cohen_kappa") == AgreeMetric::cohen_kappa);
    CHECK(agree_metric_from_string("pearson") == AgreeMetric::pearson);
    CHECK_THROWS_AS(agree_metric_from_string("icc"), Error);
    const std::vector<double> a{1, 0, 1, 0};
    CHECK(agreement_value(AgreeMetric::cohen_kappa, a, a) == 1.0);
    CHECK(agreement_value(AgreeMetric::pearson, {1, 2, 3}, {2, 4, 5}) ==
          doctest::Approx(0.98198).epsilon(1e-4));
}
