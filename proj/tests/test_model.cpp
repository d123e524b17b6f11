#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "ssmrec/model.hpp"
#include "ssmrec/rng.hpp"

using namespace ssmrec;

namespace {

Matrix random_matrix(int rows, int cols, Rng& rng) {
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.normal();
    return m;
}

InteractionDataset random_graph(int users, int items, Rng& rng) {
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> pool(items);
    for (int i = 0; i < items; ++i) pool[i] = i;
    for (int u = 0; u < users; ++u) {
        int deg = 1 + rng.uniform_int(items);
        rng.shuffle(pool);
        for (int k = 0; k < deg; ++k) pairs.emplace_back(u, pool[k]);
    }
    return InteractionDataset::from_pairs(users, items, std::move(pairs));
}

double frob_inner(const Matrix& a, const Matrix& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) s += a.data()[k] * b.data()[k];
    return s;
}

}  // namespace

TEST_CASE("propagate: zero exponents give the plain neighbor sum") {
    auto g = InteractionDataset::from_pairs(2, 2, {{0, 0}, {0, 1}, {1, 0}});
    Matrix src(2, 1);
    src(0, 0) = 2.0;
    src(1, 0) = 5.0;
    Matrix out = propagate(g, src, Direction::kUserToItem, 0.0, 0.0);
    CHECK(out(0, 0) == doctest::Approx(7.0));  // item 0 sees both users
    CHECK(out(1, 0) == doctest::Approx(2.0));
}

TEST_CASE("propagate: single neighbor with target normalization is a copy") {
    auto g = InteractionDataset::from_pairs(1, 1, {{0, 0}});
    Matrix src(1, 3);
    src(0, 0) = 1.0;
    src(0, 1) = -2.0;
    src(0, 2) = 0.25;
    Matrix out = propagate(g, src, Direction::kUserToItem, 1.0, 0.0);
    for (int c = 0; c < 3; ++c) CHECK(out(0, c) == doctest::Approx(src(0, c)));
}

TEST_CASE("propagate: symmetric normalization matches a dense oracle") {
    // complete 2x2 bipartite graph, all degrees 2
    auto g = InteractionDataset::from_pairs(2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    Rng rng(3);
    Matrix src = random_matrix(2, 4, rng);
    Matrix out = propagate(g, src, Direction::kUserToItem, 0.5, 0.5);
    for (int i = 0; i < 2; ++i)
        for (int c = 0; c < 4; ++c) {
            double expect = (src(0, c) + src(1, c)) / (std::sqrt(2.0) * std::sqrt(2.0));
            CHECK(out(i, c) == doctest::Approx(expect).epsilon(1e-12));
        }
}

TEST_CASE("propagate: zero-degree targets stay zero") {
    auto g = InteractionDataset::from_pairs(1, 3, {{0, 0}});
    Matrix src(1, 2, 1.0);
    Matrix out = propagate(g, src, Direction::kUserToItem, 0.5, 0.5);
    CHECK(out(1, 0) == 0.0);
    CHECK(out(2, 1) == 0.0);
}

TEST_CASE("forward: MF returns the embeddings unchanged") {
    Rng rng(5);
    auto g = random_graph(4, 5, rng);
    EmbeddingTable emb{random_matrix(4, 3, rng), random_matrix(5, 3, rng)};
    auto z = forward({ModelKind::kMF, 0, 0, 0}, emb, g);
    CHECK(z.user == emb.user);
    CHECK(z.item == emb.item);
}

TEST_CASE("forward: user-side aggregation with one history item") {
    auto g = InteractionDataset::from_pairs(1, 1, {{0, 0}});
    EmbeddingTable emb{Matrix(1, 2), Matrix(1, 2)};
    emb.user(0, 0) = 1.0;
    emb.user(0, 1) = 2.0;
    emb.item(0, 0) = 10.0;
    emb.item(0, 1) = -3.0;
    auto z = forward({ModelKind::kSVDppUser, 1.0, 0.0, 0}, emb, g);
    CHECK(z.user(0, 0) == doctest::Approx(11.0));
    CHECK(z.user(0, 1) == doctest::Approx(-1.0));
    CHECK(z.item == emb.item);
}

TEST_CASE("forward: LightGCN matches the dense normalized-adjacency oracle") {
    auto g = InteractionDataset::from_pairs(3, 3, {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 0}});
    Rng rng(7);
    int d = 4, K = 2;
    EmbeddingTable emb{random_matrix(3, d, rng), random_matrix(3, d, rng)};

    // dense oracle over the (M+N)-node graph
    int n = 6;
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    for (int u = 0; u < 3; ++u)
        for (int i : g.items_of(u)) {
            double w = 1.0 / (std::sqrt(g.user_degree(u)) * std::sqrt(g.item_degree(i)));
            A[u][3 + i] = w;
            A[3 + i][u] = w;
        }
    std::vector<std::vector<double>> E(n, std::vector<double>(d));
    for (int u = 0; u < 3; ++u)
        for (int c = 0; c < d; ++c) E[u][c] = emb.user(u, c);
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < d; ++c) E[3 + i][c] = emb.item(i, c);
    auto Esum = E;
    for (int k = 0; k < K; ++k) {
        std::vector<std::vector<double>> next(n, std::vector<double>(d, 0.0));
        for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s)
                for (int c = 0; c < d; ++c) next[r][c] += A[r][s] * E[s][c];
        E = next;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < d; ++c) Esum[r][c] += E[r][c];
    }

    auto z = forward({ModelKind::kLightGCN, 0.5, 0.5, K}, emb, g);
    for (int u = 0; u < 3; ++u)
        for (int c = 0; c < d; ++c)
            CHECK(z.user(u, c) == doctest::Approx(Esum[u][c] / (K + 1)).epsilon(1e-10));
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < d; ++c)
            CHECK(z.item(i, c) == doctest::Approx(Esum[3 + i][c] / (K + 1)).epsilon(1e-10));
}

TEST_CASE("forward: LightGCN with zero layers reduces to MF") {
    Rng rng(9);
    auto g = random_graph(5, 6, rng);
    EmbeddingTable emb{random_matrix(5, 4, rng), random_matrix(6, 4, rng)};
    auto z = forward({ModelKind::kLightGCN, 0.5, 0.5, 0}, emb, g);
    CHECK(z.user == emb.user);
    CHECK(z.item == emb.item);
}

TEST_CASE("forward stays finite across the exponent grid") {
    Rng rng(11);
    auto g = random_graph(6, 7, rng);
    EmbeddingTable emb{random_matrix(6, 4, rng), random_matrix(7, 4, rng)};
    for (double a0 : {0.0, 0.5, 1.0})
        for (double a1 : {0.0, 0.5, 1.0})
            for (ModelKind kind : {ModelKind::kSVDppUser, ModelKind::kSVDppItem}) {
                auto z = forward({kind, a0, a1, 0}, emb, g);
                CHECK(z.user.all_finite());
                CHECK(z.item.all_finite());
            }
}

TEST_CASE("backward: adjoint identity <F(x), y> == <x, F^T(y)>") {
    Rng rng(13);
    for (int t = 0; t < 50; ++t) {
        auto g = random_graph(3 + rng.uniform_int(5), 3 + rng.uniform_int(5), rng);
        int d = 1 + rng.uniform_int(4);
        RecommenderConfig cfgs[] = {
            {ModelKind::kMF, 0, 0, 0},
            {ModelKind::kSVDppUser, 1.0, 0.0, 0},
            {ModelKind::kSVDppItem, 0.5, 0.5, 0},
            {ModelKind::kLightGCN, 0.5, 0.5, 1 + rng.uniform_int(3)},
        };
        for (const auto& cfg : cfgs) {
            EmbeddingTable x{random_matrix(g.num_users(), d, rng),
                             random_matrix(g.num_items(), d, rng)};
            Representations y{random_matrix(g.num_users(), d, rng),
                              random_matrix(g.num_items(), d, rng)};
            auto fx = forward(cfg, x, g);
            auto fty = backward(cfg, g, y);
            double lhs = frob_inner(fx.user, y.user) + frob_inner(fx.item, y.item);
            double rhs = frob_inner(x.user, fty.user) + frob_inner(x.item, fty.item);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
    }
}

TEST_CASE("backward: single edge adjoint coefficient equals forward coefficient") {
    auto g = InteractionDataset::from_pairs(1, 1, {{0, 0}});
    Representations grad{Matrix(1, 1), Matrix(1, 1)};
    grad.user(0, 0) = 1.0;
    auto table = backward({ModelKind::kSVDppUser, 0.5, 0.5, 0}, g, grad);
    // forward coefficient on the lone edge is 1/(1^0.5 * 1^0.5) = 1
    CHECK(table.item(0, 0) == doctest::Approx(1.0));
    CHECK(table.user(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("xavier init: bound, determinism, mean") {
    auto table = init_xavier(200, 200, 64, 123);
    double bound = std::sqrt(6.0 / 128.0);
    CHECK(bound == doctest::Approx(0.2165).epsilon(1e-3));
    double sum = 0.0;
    std::size_t n = 0;
    for (const Matrix* m : {&table.user, &table.item})
        for (double v : m->data()) {
            CHECK(std::abs(v) <= bound);
            sum += v;
            ++n;
        }
    // uniform variance bound^2/3; a 3-sigma band around the zero mean
    double sigma = bound / std::sqrt(3.0);
    CHECK(std::abs(sum / n) < 3.0 * sigma / std::sqrt(static_cast<double>(n)));

    auto again = init_xavier(200, 200, 64, 123);
    CHECK(table == again);
    auto other = init_xavier(200, 200, 64, 124);
    CHECK_FALSE(table == other);
}

TEST_CASE("propagated second moment scales with target degree") {
    // alpha1 = 0 makes the law exact for any source-degree distribution:
    // E((q')^2) = degree^(1-2*alpha0) * sigma0^2 at zero-mean init.
    Rng rng(17);
    const int items_per_bucket = 500, d = 16;
    const std::vector<int> degrees = {1, 2, 4, 8};
    int num_items = items_per_bucket * static_cast<int>(degrees.size());
    int num_users = 600;
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> pool(num_users);
    for (int u = 0; u < num_users; ++u) pool[u] = u;
    int item = 0;
    std::vector<int> item_degree(num_items);
    for (int deg : degrees)
        for (int k = 0; k < items_per_bucket; ++k) {
            rng.shuffle(pool);
            for (int e = 0; e < deg; ++e) pairs.emplace_back(pool[e], item);
            item_degree[item] = deg;
            ++item;
        }
    auto g = InteractionDataset::from_pairs(num_users, num_items, std::move(pairs));

    for (double a0 : {0.5, 1.0}) {
        Matrix src(num_users, d);
        for (double& v : src.data()) v = rng.normal(0.0, 1.0);
        Matrix out = propagate(g, src, Direction::kUserToItem, a0, 0.0);
        for (std::size_t b = 0; b < degrees.size(); ++b) {
            double mean_sq = 0.0;
            std::int64_t count = 0;
            for (int i = 0; i < num_items; ++i) {
                if (item_degree[i] != degrees[b]) continue;
                for (int c = 0; c < d; ++c) {
                    mean_sq += out(i, c) * out(i, c);
                    ++count;
                }
            }
            mean_sq /= count;
            double expected = std::pow(static_cast<double>(degrees[b]), 1.0 - 2.0 * a0);
            CHECK(mean_sq == doctest::Approx(expected).epsilon(0.10));
        }
    }
}

TEST_CASE("embedding io round trip") {
    Rng rng(19);
    EmbeddingTable table{random_matrix(7, 5, rng), random_matrix(9, 5, rng)};
    auto path = std::filesystem::temp_directory_path() / "ssmrec_emb_test.bin";
    save_embeddings(table, path.string());
    auto loaded = load_embeddings(path.string());
    CHECK(loaded == table);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_embeddings("/no/such/checkpoint.bin"), std::runtime_error);
}

TEST_CASE("dimension mismatches are rejected") {
    auto g = InteractionDataset::from_pairs(2, 2, {{0, 0}, {1, 1}});
    Matrix wrong(3, 2);
    CHECK_THROWS_AS(propagate(g, wrong, Direction::kUserToItem, 0.5, 0.5),
                    std::invalid_argument);
    EmbeddingTable bad{Matrix(1, 2), Matrix(2, 2)};
    CHECK_THROWS_AS(forward({ModelKind::kMF, 0, 0, 0}, bad, g), std::invalid_argument);
}
