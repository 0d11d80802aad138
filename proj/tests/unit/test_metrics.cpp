#include <doctest.h>

#include <cmath>

#include "tandem/error.hpp"
#include "tandem/metrics.hpp"
#include "tandem/rng.hpp"

using namespace tandem;

namespace {

// Independent confusion-matrix oracle: plain counting, no shared code with
// the implementation path.
struct Counts {
    double tp = 0, fp = 0, fn = 0, tn = 0;
};
Counts count_oracle(const std::vector<double>& t, const std::vector<double>& p) {
    Counts c;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == 1 && p[i] == 1) c.tp++;
        if (t[i] == 0 && p[i] == 1) c.fp++;
        if (t[i] == 1 && p[i] == 0) c.fn++;
        if (t[i] == 0 && p[i] == 0) c.tn++;
    }
    return c;
}

}  // namespace

TEST_CASE("f1 on a hand confusion matrix") {
    // y_true=[1,1,0,0], y_pred=[1,0,1,0]: TP=1, FP=1, FN=1 -> F1 = 0.5
    const std::vector<double> yt{1, 1, 0, 0};
    const std::vector<double> yp{1, 0, 1, 0};
    const Counts c = count_oracle(yt, yp);
    CHECK(c.tp == 1);
    CHECK(c.fp == 1);
    CHECK(c.fn == 1);
    CHECK(score(Criterion{CriterionName::f1}, yt, yp) == doctest::Approx(0.5));
}

TEST_CASE("perfect non-constant prediction gives f1 = 1") {
    const std::vector<double> y{1, 0, 1, 1, 0};
    CHECK(score(Criterion{CriterionName::f1}, y, y) == 1.0);
}

TEST_CASE("rmse on residuals 3 and 4") {
    // mse = (9 + 16) / 2 = 12.5, rmse = sqrt(12.5)
    const std::vector<double> yt{0, 0};
    const std::vector<double> yp{3, 4};
    CHECK(score(Criterion{CriterionName::mse}, yt, yp) == doctest::Approx(12.5));
    CHECK(score(Criterion{CriterionName::rmse}, yt, yp) ==
          doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
    CHECK(score(Criterion{CriterionName::mae}, yt, yp) == doctest::Approx(3.5));
}

TEST_CASE("zero-division conventions") {
    // All-negative predictions: TP = 0, FP = 0 -> precision 0, and with
    // FN > 0 recall and f1 are 0 too, never a division failure.
    const std::vector<double> yt{1, 1, 0};
    const std::vector<double> yp{0, 0, 0};
    CHECK(score(Criterion{CriterionName::precision}, yt, yp) == 0.0);
    CHECK(score(Criterion{CriterionName::recall}, yt, yp) == 0.0);
    CHECK(score(Criterion{CriterionName::f1}, yt, yp) == 0.0);
}

TEST_CASE("direction-aware comparison") {
    CHECK(better(Criterion{CriterionName::f1}, 0.64, 0.62) == Better::a_better);
    CHECK(better(Criterion{CriterionName::mse}, 0.64, 0.62) == Better::b_better);
    CHECK(better(Criterion{CriterionName::f1}, 0.5, 0.5) == Better::tie);
    CHECK_THROWS_AS(better(Criterion{CriterionName::f1}, std::nan(""), 0.5), Error);
}

TEST_CASE("errors: length mismatch and empty input") {
    CHECK_THROWS_AS(score(Criterion{CriterionName::f1}, {1, 0}, {1}), Error);
    CHECK_THROWS_AS(score(Criterion{CriterionName::mse}, {}, {}), Error);
    CHECK_THROWS_AS(score(Criterion{CriterionName::f1}, {0.5, 1}, {1, 1}), Error);
}

TEST_CASE("criterion names round-trip and bad names fail with the option list") {
    for (const char* name : {"accuracy", "precision", "recall", "f1", "mse", "rmse", "mae"})
        CHECK(Criterion::from_string(name).str() == name);
    CHECK_THROWS_WITH_AS(Criterion::from_string("auc"),
                         doctest::Contains("valid options"), Error);
    CHECK(Criterion::from_string("f1").direction() == Direction::maximize);
    CHECK(Criterion::from_string("mae").direction() == Direction::minimize);
    CHECK(Criterion::from_string("accuracy").compatible_with(Task::classification));
    CHECK_FALSE(Criterion::from_string("accuracy").compatible_with(Task::regression));
    CHECK(Criterion::from_string("rmse").compatible_with(Task::regression));
}

TEST_CASE("classification metrics vs the counting oracle on random vectors") {
    Rng rng(20240811);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(40);
        std::vector<double> yt(n), yp(n);
        for (std::size_t i = 0; i < n; ++i) {
            yt[i] = static_cast<double>(rng.below(2));
            yp[i] = static_cast<double>(rng.below(2));
        }
        const Counts c = count_oracle(yt, yp);
        const double acc = score(Criterion{CriterionName::accuracy}, yt, yp);
        CHECK(acc == doctest::Approx((c.tp + c.tn) / static_cast<double>(n)));
        CHECK(acc >= 0.0);
        CHECK(acc <= 1.0);
        const double prec = score(Criterion{CriterionName::precision}, yt, yp);
        const double rec = score(Criterion{CriterionName::recall}, yt, yp);
        const double f1 = score(Criterion{CriterionName::f1}, yt, yp);
        CHECK(prec == doctest::Approx(c.tp + c.fp == 0 ? 0.0 : c.tp / (c.tp + c.fp)));
        CHECK(rec == doctest::Approx(c.tp + c.fn == 0 ? 0.0 : c.tp / (c.tp + c.fn)));
        if (prec + rec > 0)
            CHECK(f1 == doctest::Approx(2 * prec * rec / (prec + rec)));
        else
            CHECK(f1 == 0.0);
    }
}

TEST_CASE("rmse = sqrt(mse) and permutation invariance") {
    Rng rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 2 + rng.below(30);
        std::vector<double> yt(n), yp(n);
        for (std::size_t i = 0; i < n; ++i) {
            yt[i] = rng.normal();
            yp[i] = rng.normal();
        }
        const double mse = score(Criterion{CriterionName::mse}, yt, yp);
        const double rmse = score(Criterion{CriterionName::rmse}, yt, yp);
        CHECK(rmse == doctest::Approx(std::sqrt(mse)).epsilon(1e-12));
    }

    // Simultaneous row permutation leaves the classification metrics alone.
    std::vector<double> yt(40), yp(40);
    for (std::size_t i = 0; i < 40; ++i) {
        yt[i] = static_cast<double>(rng.below(2));
        yp[i] = static_cast<double>(rng.below(2));
    }
    std::vector<std::size_t> perm(40);
    for (std::size_t i = 0; i < 40; ++i) perm[i] = i;
    rng.shuffle(perm);
    std::vector<double> yt2(40), yp2(40);
    for (std::size_t i = 0; i < 40; ++i) {
        yt2[i] = yt[perm[i]];
        yp2[i] = yp[perm[i]];
    }
    for (auto name : {CriterionName::precision, CriterionName::recall, CriterionName::f1})
        CHECK(score(Criterion{name}, yt, yp) == score(Criterion{name}, yt2, yp2));
}
