#include "doctest.h"

#include <cmath>
#include <deque>

#include "sduo/metrics.hpp"
#include "sduo/rng.hpp"

using namespace sduo;

namespace {

struct Obs {
    Eigen::VectorXd scores;
    int actual;
};

// Quadratic reference: mean one-vs-one AUC over the window, ties worth 0.5.
double brute_pmauc(const std::deque<Obs>& window, int K) {
    double total = 0.0;
    int pairs = 0;
    for (int i = 0; i < K; ++i)
        for (int j = i + 1; j < K; ++j) {
            std::vector<double> pos, neg;
            for (const auto& o : window) {
                if (o.actual == i + 1)
                    pos.push_back(o.scores(i));
                else if (o.actual == j + 1)
                    neg.push_back(o.scores(i));
            }
            if (pos.empty() || neg.empty())
                continue;
            double credit = 0.0;
            for (double p : pos)
                for (double n : neg)
                    credit += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
            total += credit / (static_cast<double>(pos.size()) * neg.size());
            ++pairs;
        }
    return pairs == 0 ? 0.5 : total / pairs;
}

Eigen::VectorXd unit_score(int K, int hot, double value = 1.0) {
    Eigen::VectorXd s = Eigen::VectorXd::Constant(K, (1.0 - value) / (K - 1));
    s(hot - 1) = value;
    return s;
}

} // namespace

TEST_SUITE_BEGIN("evaluation");

TEST_CASE("unfaded gmean equals the cumulative per-class recall product") {
    auto rng = make_rng(61);
    std::uniform_int_distribution<int> cls(1, 4);
    std::bernoulli_distribution hit(0.7);

    FadingGmean g(4, 1.0);
    Eigen::Vector4d correct = Eigen::Vector4d::Zero();
    Eigen::Vector4d seen = Eigen::Vector4d::Zero();
    for (int i = 0; i < 3000; ++i) {
        const int actual = cls(rng);
        const int predicted = hit(rng) ? actual : cls(rng);
        g.update(predicted, actual);
        seen(actual - 1) += 1.0;
        if (predicted == actual)
            correct(actual - 1) += 1.0;

        double prod = 1.0;
        int observed = 0;
        bool zero = false;
        for (int c = 0; c < 4; ++c) {
            if (seen(c) == 0.0)
                continue;
            ++observed;
            const double r = correct(c) / seen(c);
            if (r == 0.0)
                zero = true;
            prod *= r;
        }
        const double reference =
            zero ? 0.0 : std::pow(prod, 1.0 / observed);
        CHECK(std::abs(g.value() - reference) <= 1e-12);
    }
}

TEST_CASE("gmean reference points") {
    FadingGmean g(3, 1.0);
    g.update(1, 1);
    g.update(2, 2);
    g.update(3, 3);
    CHECK(g.value() == doctest::Approx(1.0));

    // recalls (1, 0.25) -> sqrt(0.25) = 0.5
    FadingGmean h(2, 1.0);
    for (int i = 0; i < 4; ++i)
        h.update(1, 1);
    h.update(2, 2);
    for (int i = 0; i < 3; ++i)
        h.update(1, 2);
    CHECK(h.value() == doctest::Approx(0.5));

    FadingGmean z(2, 1.0);
    z.update(2, 1); // single observed class, recall 0
    CHECK(z.value() == 0.0);

    FadingGmean fresh(2, 0.99);
    CHECK(fresh.value() == 0.0); // nothing observed yet

    CHECK_THROWS_AS(FadingGmean(2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(FadingGmean(2, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(FadingGmean(1, 0.99), std::invalid_argument);
}

TEST_CASE("fading forgets old mistakes") {
    FadingGmean g(2, 0.9);
    g.update(2, 1); // early mistake on class 1
    g.update(2, 2);
    CHECK(g.value() == 0.0);
    for (int i = 0; i < 400; ++i) {
        g.update(1, 1);
        g.update(2, 2);
    }
    // recall of class 1 recovers toward 1 as the mistake fades
    CHECK(g.value() > 0.99);

    // faded and unfaded agree while everything is correct
    FadingGmean a(2, 0.99), b(2, 1.0);
    for (int i = 0; i < 50; ++i) {
        a.update(i % 2 + 1, i % 2 + 1);
        b.update(i % 2 + 1, i % 2 + 1);
        CHECK(a.value() == doctest::Approx(b.value()));
    }
}

TEST_CASE("pmauc reference points") {
    SlidingPmauc p(2, 100);
    CHECK(p.value() == 0.5); // empty window

    // perfectly separating scores
    for (int i = 0; i < 20; ++i) {
        p.update(unit_score(2, 1, 0.9), 1);
        p.update(unit_score(2, 2, 0.9), 2);
    }
    CHECK(p.value() == doctest::Approx(1.0));

    // indistinguishable scores: every comparison is a tie
    SlidingPmauc q(3, 100);
    for (int i = 0; i < 30; ++i)
        q.update(Eigen::Vector3d::Constant(1.0 / 3.0), i % 3 + 1);
    CHECK(q.value() == doctest::Approx(0.5));

    // inverted scores
    SlidingPmauc r(2, 100);
    for (int i = 0; i < 10; ++i) {
        r.update(unit_score(2, 2, 0.9), 1);
        r.update(unit_score(2, 1, 0.9), 2);
    }
    CHECK(r.value() == doctest::Approx(0.0));

    // a class pair with an empty side is skipped
    SlidingPmauc s(3, 100);
    s.update(unit_score(3, 1, 0.8), 1);
    s.update(unit_score(3, 2, 0.8), 2);
    CHECK(s.value() == doctest::Approx(1.0)); // only pair (1,2) scorable
}

TEST_CASE("incremental pmauc matches the quadratic reference exactly") {
    auto rng = make_rng(62);
    std::uniform_int_distribution<int> cls(1, 3);
    std::uniform_int_distribution<int> level(0, 4); // few levels force ties
    const int W = 50;

    SlidingPmauc p(3, W);
    std::deque<Obs> window;
    for (int i = 0; i < 600; ++i) {
        Eigen::Vector3d s;
        for (int c = 0; c < 3; ++c)
            s(c) = level(rng) / 4.0;
        s /= s.sum() == 0.0 ? 1.0 : s.sum();
        const int actual = cls(rng);

        p.update(s, actual);
        window.push_back({s, actual});
        if (window.size() > W)
            window.pop_front();

        CHECK(std::abs(p.value() - brute_pmauc(window, 3)) <= 1e-12);
    }
    CHECK(p.buffered() == W);
}

TEST_CASE("pmauc window semantics") {
    SlidingPmauc p(2, 3);
    p.update(unit_score(2, 2, 0.9), 1); // inverted pair, will be evicted
    p.update(unit_score(2, 1, 0.9), 2);
    CHECK(p.value() == doctest::Approx(0.0));
    p.update(unit_score(2, 1, 0.9), 1);
    p.update(unit_score(2, 2, 0.9), 2); // evicts the first record
    CHECK(p.buffered() == 3);
    // window: pos {0.9} vs neg {0.9, 0.1} -> one tie, one win
    CHECK(p.value() == doctest::Approx(0.75));
}

TEST_CASE("two-class pmauc is symmetric under class relabelling") {
    // with complement scores the positive-class convention cancels out
    auto rng = make_rng(63);
    std::uniform_int_distribution<int> cls(1, 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    SlidingPmauc orig(2, 40);
    SlidingPmauc swapped(2, 40);
    for (int i = 0; i < 200; ++i) {
        const double s1 = u(rng);
        const int actual = cls(rng);
        orig.update(Eigen::Vector2d(s1, 1.0 - s1), actual);
        swapped.update(Eigen::Vector2d(1.0 - s1, s1), 3 - actual);
        CHECK(orig.value() == doctest::Approx(swapped.value()).epsilon(1e-12));
    }
}

TEST_CASE("aggregation across runs") {
    RunLog a, b;
    for (int t = 1; t <= 5; ++t) {
        a.steps.push_back({t, 1, 1, false, 0.5, 0.6, 0.01});
        b.steps.push_back({t, 1, 1, false, 0.7, 0.8, 0.03});
    }

    const AggregateLog solo = aggregate_runs({a});
    CHECK(solo.gmean.mean[2] == doctest::Approx(0.5));
    CHECK(solo.gmean.stddev[2] == doctest::Approx(0.0));

    const AggregateLog both = aggregate_runs({a, b});
    CHECK(both.gmean.mean[0] == doctest::Approx(0.6));
    CHECK(both.gmean.stddev[0] == doctest::Approx(0.1));
    CHECK(both.pmauc.mean[4] == doctest::Approx(0.7));
    CHECK(both.budget_spent.stddev[4] == doctest::Approx(0.01));

    RunLog ragged;
    ragged.steps.push_back({1, 1, 1, false, 0.0, 0.0, 0.0});
    CHECK_THROWS_AS(aggregate_runs({a, ragged}), std::invalid_argument);
    CHECK_THROWS_AS(aggregate_runs({}), std::invalid_argument);

    // ten random runs against a two-pass reference
    auto rng = make_rng(64);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<RunLog> logs(10);
    for (auto& log : logs)
        for (int t = 1; t <= 20; ++t)
            log.steps.push_back({t, 1, 1, false, u(rng), u(rng), u(rng)});
    const AggregateLog agg = aggregate_runs(logs);
    for (int t = 0; t < 20; ++t) {
        double mean = 0.0;
        for (const auto& log : logs)
            mean += log.steps[static_cast<std::size_t>(t)].gmean;
        mean /= 10.0;
        double var = 0.0;
        for (const auto& log : logs) {
            const double d = log.steps[static_cast<std::size_t>(t)].gmean - mean;
            var += d * d;
        }
        var /= 10.0;
        CHECK(agg.gmean.mean[static_cast<std::size_t>(t)] ==
              doctest::Approx(mean).epsilon(1e-12));
        CHECK(agg.gmean.stddev[static_cast<std::size_t>(t)] ==
              doctest::Approx(std::sqrt(var)).epsilon(1e-12));
    }
}

TEST_SUITE_END();
