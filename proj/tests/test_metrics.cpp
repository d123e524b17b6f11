#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ssmrec/metrics.hpp"
#include "ssmrec/rng.hpp"

using namespace ssmrec;

TEST_CASE("rank_items: sort, tie break, exclusion") {
    std::vector<double> scores = {0.1, 0.9, 0.5};
    auto top = rank_items(scores, {}, 2);
    CHECK(top.items == std::vector<int>{1, 2});
    CHECK_FALSE(top.truncated);

    std::vector<double> equal = {0.3, 0.3, 0.3, 0.3};
    CHECK(rank_items(equal, {}, 3).items == std::vector<int>{0, 1, 2});

    std::vector<char> excluded = {0, 1, 0};
    CHECK(rank_items(scores, excluded, 2).items == std::vector<int>{2, 0});

    auto flagged = rank_items(scores, {}, 5);
    CHECK(flagged.truncated);
    CHECK(flagged.items.size() == 3);
}

TEST_CASE("recall at k") {
    RankedList ranked;
    ranked.items = {4, 1, 7};
    std::vector<int> all_hit = {1, 4, 7};
    CHECK(recall_at_k(ranked, all_hit, 3) == doctest::Approx(1.0));
    std::vector<int> miss = {2, 3};
    CHECK(recall_at_k(ranked, miss, 3) == doctest::Approx(0.0));
    std::vector<int> half = {1, 9};
    CHECK(recall_at_k(ranked, half, 3) == doctest::Approx(0.5));
    CHECK_THROWS_AS(recall_at_k(ranked, std::vector<int>{}, 3), std::invalid_argument);
}

TEST_CASE("ndcg at k") {
    RankedList ranked;
    ranked.items = {4, 1, 7};
    std::vector<int> first = {4};
    CHECK(ndcg_at_k(ranked, first, 3) == doctest::Approx(1.0));
    std::vector<int> second = {1};
    CHECK(ndcg_at_k(ranked, second, 3) == doctest::Approx(1.0 / std::log2(3.0)).epsilon(1e-9));
    CHECK(ndcg_at_k(ranked, second, 3) == doctest::Approx(0.6309).epsilon(1e-4));
    std::vector<int> both = {1, 4};
    CHECK(ndcg_at_k(ranked, both, 3) == doctest::Approx(1.0));
}

namespace {

struct Setup {
    InteractionDataset train, test;
    Representations z;
    ItemGroups groups;
};

Setup random_setup(Rng& rng, int users = 12, int items = 15, int d = 6) {
    std::vector<std::pair<int, int>> train_pairs, test_pairs;
    for (int u = 0; u < users; ++u) {
        std::vector<int> pool(items);
        std::iota(pool.begin(), pool.end(), 0);
        rng.shuffle(pool);
        int n_train = 2 + rng.uniform_int(4);
        int n_test = rng.uniform_int(4);  // sometimes empty
        for (int k = 0; k < n_train; ++k) train_pairs.emplace_back(u, pool[k]);
        for (int k = 0; k < n_test; ++k) test_pairs.emplace_back(u, pool[n_train + k]);
    }
    Setup s;
    s.train = InteractionDataset::from_pairs(users, items, train_pairs);
    s.test = InteractionDataset::from_pairs(users, items, test_pairs);
    s.z = Representations{Matrix(users, d), Matrix(items, d)};
    for (double& v : s.z.user.data()) v = rng.normal();
    for (double& v : s.z.item.data()) v = rng.normal();
    s.groups = partition_item_groups(s.train, 4);
    return s;
}

}  // namespace

TEST_CASE("group decomposition sums to total recall") {
    Rng rng(61);
    for (int t = 0; t < 100; ++t) {
        Setup s = random_setup(rng);
        EvalOptions opts;
        opts.k = 5;
        auto report = evaluate(s.z, s.test, s.train, nullptr, &s.groups, opts);
        double sum = 0.0;
        for (double g : report.group_recall) sum += g;
        CHECK(std::abs(sum - report.recall) < 1e-12);
        CHECK(report.recall >= 0.0);
        CHECK(report.recall <= 1.0);
        CHECK(report.ndcg >= 0.0);
        CHECK(report.ndcg <= 1.0);
    }
}

TEST_CASE("single group carries the whole recall") {
    Rng rng(67);
    Setup s = random_setup(rng);
    auto groups = partition_item_groups(s.train, 1);
    EvalOptions opts;
    opts.k = 5;
    auto report = evaluate(s.z, s.test, s.train, nullptr, &groups, opts);
    REQUIRE(report.group_recall.size() == 1);
    CHECK(report.group_recall[0] == doctest::Approx(report.recall).epsilon(1e-14));
}

TEST_CASE("hits concentrated in one group") {
    // all item frequencies 2 -> groups {0,1} and {2,3}; user 0 tests on group-1 items
    auto train = InteractionDataset::from_pairs(
        3, 4, {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}});
    auto test = InteractionDataset::from_pairs(3, 4, {{0, 2}, {0, 3}});
    auto groups = partition_item_groups(train, 2);
    REQUIRE(groups.group_of_item == std::vector<int>{0, 0, 1, 1});

    Representations z{Matrix(3, 1, 1.0), Matrix(4, 1, 1.0)};
    EvalOptions opts;
    opts.k = 2;
    auto report = evaluate(z, test, train, nullptr, &groups, opts);
    CHECK(report.recall == doctest::Approx(1.0));
    CHECK(report.group_recall[0] == doctest::Approx(0.0));
    CHECK(report.group_recall[1] == doctest::Approx(1.0));
}

TEST_CASE("users without test items are skipped and counted") {
    auto train = InteractionDataset::from_pairs(3, 4, {{0, 0}, {1, 1}, {2, 2}});
    auto test = InteractionDataset::from_pairs(3, 4, {{0, 1}});
    Representations z{Matrix(3, 2, 0.5), Matrix(4, 2, 0.5)};
    EvalOptions opts;
    opts.k = 2;
    auto report = evaluate(z, test, train, nullptr, nullptr, opts);
    CHECK(report.users_evaluated == 1);
    CHECK(report.users_skipped == 2);
}

TEST_CASE("validation exclusion removes candidates") {
    // one user; item 1 scores highest but sits in the validation set
    auto train = InteractionDataset::from_pairs(1, 3, {{0, 0}});
    auto val = InteractionDataset::from_pairs(1, 3, {{0, 1}});
    auto test = InteractionDataset::from_pairs(1, 3, {{0, 2}});
    Representations z{Matrix(1, 1), Matrix(3, 1)};
    z.user(0, 0) = 1.0;
    z.item(0, 0) = 0.9;
    z.item(1, 0) = 1.0;
    z.item(2, 0) = 0.1;
    EvalOptions opts;
    opts.k = 1;
    auto without = evaluate(z, test, train, nullptr, nullptr, opts);
    CHECK(without.recall == doctest::Approx(0.0));  // item 1 occupies the top slot
    auto with = evaluate(z, test, train, &val, nullptr, opts);
    CHECK(with.recall == doctest::Approx(1.0));  // item 1 excluded, item 2 surfaces
}

TEST_CASE("evaluation is invariant to worker count") {
    Rng rng(71);
    Setup s = random_setup(rng, 30, 20);
    EvalOptions opts;
    opts.k = 5;
    setenv("SSMREC_THREADS", "1", 1);
    auto serial = evaluate(s.z, s.test, s.train, nullptr, &s.groups, opts);
    setenv("SSMREC_THREADS", "4", 1);
    auto parallel = evaluate(s.z, s.test, s.train, nullptr, &s.groups, opts);
    unsetenv("SSMREC_THREADS");
    CHECK(serial.recall == parallel.recall);
    CHECK(serial.ndcg == parallel.ndcg);
    CHECK(serial.group_recall == parallel.group_recall);
}

TEST_CASE("cosine test-time scoring ranks by angle") {
    auto train = InteractionDataset::from_pairs(1, 3, {{0, 2}});
    auto test = InteractionDataset::from_pairs(1, 3, {{0, 0}});
    Representations z{Matrix(1, 2), Matrix(3, 2)};
    z.user(0, 0) = 1.0;
    z.user(0, 1) = 0.0;
    z.item(0, 0) = 0.1;   // aligned but tiny: wins under cosine
    z.item(0, 1) = 0.0;
    z.item(1, 0) = 5.0;   // big norm, off angle: wins under inner product
    z.item(1, 1) = 5.0;
    z.item(2, 0) = -1.0;
    EvalOptions opts;
    opts.k = 1;
    opts.similarity = SimilarityKind::kInnerProduct;
    CHECK(evaluate(z, test, train, nullptr, nullptr, opts).recall == doctest::Approx(0.0));
    opts.similarity = SimilarityKind::kCosine;
    CHECK(evaluate(z, test, train, nullptr, nullptr, opts).recall == doctest::Approx(1.0));
}
