#include "doctest.h"

#include <set>

#include "sduo/memory.hpp"
#include "sduo/rng.hpp"
#include "test_util.hpp"

using namespace sduo;
using namespace sduo::testutil;

namespace {

LabelledExample ex(double a, double b, int label) {
    return {Eigen::Vector2d(a, b), label};
}

} // namespace

TEST_SUITE_BEGIN("memory");

TEST_CASE("construction: empty seed, full seed, over-full seed") {
    MultiMemory empty(2, 10);
    CHECK(empty.size(1) == 0);
    CHECK(empty.size(2) == 0);

    std::vector<LabelledExample> seed;
    for (int c = 1; c <= 3; ++c)
        for (int i = 0; i < 10; ++i)
            seed.push_back(ex(c, i, c));
    MultiMemory full(3, 10, seed);
    for (int c = 1; c <= 3; ++c)
        CHECK(full.size(c) == 10);

    std::vector<LabelledExample> twelve;
    for (int i = 0; i < 12; ++i)
        twelve.push_back(ex(i, i, 1));
    MultiMemory trimmed(2, 10, twelve);
    CHECK(trimmed.size(1) == 10);
    CHECK(trimmed.queue(1).front().x(0) == 2.0); // oldest two evicted
    CHECK(trimmed.queue(1).back().x(0) == 11.0);

    CHECK_THROWS_AS(MultiMemory(2, 10, {ex(0, 0, 3)}), std::invalid_argument);
    CHECK_THROWS_AS(MultiMemory(2, 10, {ex(0, 0, 0)}), std::invalid_argument);
}

TEST_CASE("append keeps FIFO order and leaves other queues untouched") {
    MultiMemory mem(3, 2);
    mem.append(ex(1, 0, 1));
    CHECK(mem.size(1) == 1);

    mem.append(ex(2, 0, 1));
    mem.append(ex(3, 0, 1)); // evicts (1,0)
    CHECK(mem.size(1) == 2);
    CHECK(mem.queue(1)[0].x(0) == 2.0);
    CHECK(mem.queue(1)[1].x(0) == 3.0);

    const auto snapshot2 = mem.class_matrix(2);
    const auto snapshot3 = mem.class_matrix(3);
    mem.append(ex(9, 9, 1));
    CHECK(mem.class_matrix(2) == snapshot2);
    CHECK(mem.class_matrix(3) == snapshot3);
}

TEST_CASE("FIFO property against a reference model") {
    auto rng = make_rng(101);
    std::uniform_int_distribution<int> cls(1, 4);
    const int L = 5;
    MultiMemory mem(4, L);
    std::vector<std::vector<double>> reference(5);
    for (int i = 0; i < 300; ++i) {
        const int c = cls(rng);
        mem.append(ex(i, 0, c));
        reference[static_cast<std::size_t>(c)].push_back(i);
    }
    for (int c = 1; c <= 4; ++c) {
        const auto& all = reference[static_cast<std::size_t>(c)];
        const std::size_t keep = std::min<std::size_t>(all.size(), L);
        REQUIRE(mem.size(c) == static_cast<int>(keep));
        for (std::size_t i = 0; i < keep; ++i)
            CHECK(mem.queue(c)[i].x(0) == all[all.size() - keep + i]);
    }
}

TEST_CASE("pair counts: K=2 L=2 gives 2+2, K=3 L=10 gives 135+135") {
    auto rng = make_rng(7);
    std::vector<LabelledExample> seed;
    for (int c = 1; c <= 2; ++c)
        for (int i = 0; i < 2; ++i)
            seed.push_back(ex(c, i, c));
    MultiMemory small(2, 2, seed);
    PairSet p = build_pairs(small, rng);
    CHECK(p.size() == 4);
    CHECK(p.target.sum() == doctest::Approx(2.0));

    std::vector<LabelledExample> seed3;
    for (int c = 1; c <= 3; ++c)
        for (int i = 0; i < 10; ++i)
            seed3.push_back(ex(c, i, c));
    MultiMemory big(3, 10, seed3);
    PairSet p3 = build_pairs(big, rng);
    CHECK(p3.size() == 270);
    CHECK(p3.target.sum() == doctest::Approx(135.0));
    // negatives drawn without replacement from the 300 cross-class pairs
    std::set<std::pair<int, int>> negatives;
    for (std::size_t k = 0; k < p3.size(); ++k)
        if (p3.target(static_cast<int>(k)) == 0.0)
            negatives.insert({p3.a[k], p3.b[k]});
    CHECK(negatives.size() == 135);
}

TEST_CASE("degenerate fills: one class only, or not enough positives") {
    auto rng = make_rng(8);
    MultiMemory lone(3, 10);
    lone.append(ex(0, 0, 2));
    lone.append(ex(1, 1, 2));
    CHECK(build_pairs(lone, rng).empty());

    MultiMemory sparse(3, 10);
    sparse.append(ex(0, 0, 1));
    sparse.append(ex(1, 1, 2));
    CHECK(build_pairs(sparse, rng).empty()); // no within-class pair
}

TEST_CASE("fewer cross-class candidates than positives still balances") {
    auto rng = make_rng(9);
    MultiMemory mem(2, 8);
    for (int i = 0; i < 8; ++i)
        mem.append(ex(i, 0, 1));
    mem.append(ex(99, 99, 2));
    // positives 28, cross-class candidates only 8 -> with replacement
    PairSet p = build_pairs(mem, rng);
    CHECK(p.size() == 56);
    CHECK(p.target.sum() == doctest::Approx(28.0));
}

TEST_CASE("pair labels equal label equality, balance holds on random fills") {
    auto rng = make_rng(10);
    std::uniform_int_distribution<int> cls(1, 5);
    std::uniform_int_distribution<int> n_items(0, 12);
    for (int trial = 0; trial < 25; ++trial) {
        MultiMemory mem(5, 6);
        const int items = n_items(rng) + 2;
        for (int i = 0; i < items; ++i)
            mem.append(ex(trial, i, cls(rng)));
        PairSet p = build_pairs(mem, rng);
        double positives = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            const bool same = p.pool_class[static_cast<std::size_t>(p.a[k])] ==
                              p.pool_class[static_cast<std::size_t>(p.b[k])];
            CHECK(p.target(static_cast<int>(k)) == (same ? 1.0 : 0.0));
            positives += p.target(static_cast<int>(k));
        }
        if (!p.empty())
            CHECK(2.0 * positives == doctest::Approx(
                                         static_cast<double>(p.size())));
    }
}

TEST_CASE("equal fill always leaves enough cross-class candidates") {
    auto rng = make_rng(12);
    std::uniform_int_distribution<int> Kd(2, 8), Ld(2, 12);
    for (int trial = 0; trial < 40; ++trial) {
        const int K = Kd(rng), L = Ld(rng);
        const long within = static_cast<long>(K) * L * (L - 1) / 2;
        const long cross = static_cast<long>(K) * (K - 1) / 2 * L * L;
        CHECK(cross >= within);
    }
}

TEST_CASE("encode_all mirrors the memory through the encoder") {
    auto rng = make_rng(14);
    MultiMemory mem(3, 4);
    CHECK(encode_all(mem, DenseNet(2, {}, 0.0, rng))[0].rows() == 0);

    for (int i = 0; i < 4; ++i) {
        mem.append(ex(i, -i, 1));
        mem.append(ex(i, i, 3));
    }
    // zero-depth net passes inputs through unchanged
    DenseNet identity(2, {}, 0.0, rng);
    auto enc = encode_all(mem, identity);
    CHECK(enc[0] == mem.class_matrix(1));
    CHECK(enc[1].rows() == 0);
    CHECK(enc[2] == mem.class_matrix(3));

    DenseNet real(2, {{6, Activation::leaky_relu}}, 0.0, rng);
    auto enc_before = encode_all(mem, real);
    real.layers()[0].W(0, 0) += 0.5;
    auto enc_after = encode_all(mem, real);
    CHECK((enc_before[0] - enc_after[0]).cwiseAbs().maxCoeff() > 1e-6);
    for (int c = 1; c <= 3; ++c)
        CHECK(enc_after[static_cast<std::size_t>(c - 1)].rows() ==
              mem.size(c));
}

TEST_SUITE_END();
