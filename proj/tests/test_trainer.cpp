#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ssmrec/trainer.hpp"

using namespace ssmrec;

namespace {

// block-structured preferences: user u likes items with matching parity
DatasetSplit toy_split(int users = 10, int items = 20, std::uint64_t seed = 5) {
    std::vector<std::pair<int, int>> pairs;
    for (int u = 0; u < users; ++u)
        for (int i = 0; i < items; ++i)
            if (u % 2 == i % 2) pairs.emplace_back(u, i);
    auto ds = InteractionDataset::from_pairs(users, items, pairs);
    return split_dataset(ds, seed);
}

TrainConfig base_config() {
    TrainConfig cfg;
    cfg.dim = 8;
    cfg.batch_size = 16;
    cfg.learning_rate = 0.01;
    cfg.max_epochs = 40;
    cfg.eval_every = 5;
    cfg.patience = 8;
    cfg.seed = 3;
    cfg.loss.kind = LossKind::kBPR;
    cfg.loss.similarity = SimilarityKind::kInnerProduct;
    cfg.model.kind = ModelKind::kMF;
    cfg.sampler.strategy = SamplerStrategy::kUniform;
    cfg.sampler.seed = 11;
    return cfg;
}

double table_norm(const EmbeddingTable& t) {
    double s = 0.0;
    for (double v : t.user.data()) s += v * v;
    for (double v : t.item.data()) s += v * v;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    EmbeddingTable params{Matrix(2, 3, 1.5), Matrix(2, 3, -0.5)};
    EmbeddingTable grads{Matrix(2, 3, 0.0), Matrix(2, 3, 0.0)};
    AdamState state(2, 2, 3);
    EmbeddingTable before = params;
    adam_step(params, grads, state, 0.01, 0.0);
    CHECK(params == before);
    CHECK(state.step == 1);
}

TEST_CASE("adam: constant gradient approaches a signed fixed step") {
    EmbeddingTable params{Matrix(1, 1, 0.0), Matrix(1, 1, 0.0)};
    EmbeddingTable grads{Matrix(1, 1, 0.37), Matrix(1, 1, -2.4)};
    AdamState state(1, 1, 1);
    double lr = 0.002;
    double prev_user = 0.0, prev_item = 0.0, step_user = 0.0, step_item = 0.0;
    for (int t = 0; t < 800; ++t) {
        prev_user = params.user(0, 0);
        prev_item = params.item(0, 0);
        adam_step(params, grads, state, lr, 0.0);
        step_user = params.user(0, 0) - prev_user;
        step_item = params.item(0, 0) - prev_item;
    }
    CHECK(step_user == doctest::Approx(-lr).epsilon(1e-3));
    CHECK(step_item == doctest::Approx(lr).epsilon(1e-3));
}

TEST_CASE("adam: non-finite gradients abort") {
    EmbeddingTable params{Matrix(1, 1, 0.0), Matrix(1, 1, 0.0)};
    EmbeddingTable grads{Matrix(1, 1, std::nan("")), Matrix(1, 1, 0.0)};
    AdamState state(1, 1, 1);
    CHECK_THROWS_AS(adam_step(params, grads, state, 0.01, 0.0), std::runtime_error);
}

TEST_CASE("training reduces the loss on a learnable toy problem") {
    auto split = toy_split();
    auto cfg = base_config();
    cfg.max_epochs = 100;
    auto result = train(cfg, split);
    REQUIRE(result.history.epoch_loss.size() >= 10);
    CHECK(result.history.epoch_loss.back() < result.history.epoch_loss.front());
    for (double loss : result.history.epoch_loss) CHECK(std::isfinite(loss));
}

TEST_CASE("training is bitwise deterministic") {
    auto split = toy_split();
    auto cfg = base_config();
    cfg.max_epochs = 10;
    cfg.eval_every = 2;
    auto a = train(cfg, split);
    auto b = train(cfg, split);
    CHECK(a.table == b.table);
    CHECK(a.history.epoch_loss == b.history.epoch_loss);
    REQUIRE(a.history.evals.size() == b.history.evals.size());
    for (std::size_t i = 0; i < a.history.evals.size(); ++i) {
        CHECK(a.history.evals[i].recall == b.history.evals[i].recall);
        CHECK(a.history.evals[i].ndcg == b.history.evals[i].ndcg);
    }
}

TEST_CASE("l2 regularization shrinks the parameters") {
    auto split = toy_split();
    auto cfg = base_config();
    cfg.max_epochs = 30;
    auto loose = train(cfg, split);
    cfg.l2_coeff = 0.1;
    auto tight = train(cfg, split);
    CHECK(table_norm(tight.table) < table_norm(loose.table));
}

TEST_CASE("checkpoint tracks the best validation recall") {
    auto split = toy_split(12, 20, 9);
    auto cfg = base_config();
    cfg.max_epochs = 30;
    cfg.eval_every = 3;
    auto result = train(cfg, split);
    REQUIRE(!result.history.evals.empty());
    double best = 0.0;
    int best_epoch = -1;
    for (const auto& e : result.history.evals)
        if (best_epoch < 0 || e.recall > best) {
            best = e.recall;
            best_epoch = e.epoch;
        }
    CHECK(result.history.best_recall == doctest::Approx(best));
    CHECK(result.history.best_epoch == best_epoch);
}

TEST_CASE("early stopping halts before max_epochs on a saturated problem") {
    auto split = toy_split();
    auto cfg = base_config();
    cfg.max_epochs = 400;
    cfg.eval_every = 1;
    cfg.patience = 3;
    auto result = train(cfg, split);
    CHECK(result.history.epochs_run < cfg.max_epochs);
}

TEST_CASE("cosine-trained magnitudes drift less than inner-product ones") {
    auto split = toy_split(12, 20, 21);
    auto cfg = base_config();
    cfg.max_epochs = 30;
    cfg.eval_every = 30;
    cfg.sampler.strategy = SamplerStrategy::kInBatch;
    cfg.loss.kind = LossKind::kSSM;
    cfg.loss.similarity = SimilarityKind::kCosine;
    cfg.loss.temperature = 0.2;
    auto cosine_run = train(cfg, split);

    cfg.loss.kind = LossKind::kBPR;
    cfg.loss.similarity = SimilarityKind::kInnerProduct;
    cfg.sampler.strategy = SamplerStrategy::kUniform;
    auto ip_run = train(cfg, split);

    auto mean_norm = [](const Matrix& m) {
        double s = 0.0;
        for (int r = 0; r < m.rows(); ++r) s += norm2(m.row(r));
        return s / m.rows();
    };
    auto init = init_xavier(split.train.num_users(), split.train.num_items(), cfg.dim, cfg.seed);
    double initial = mean_norm(init.user);
    double drift_cos = std::abs(mean_norm(cosine_run.table.user) - initial);
    double drift_ip = std::abs(mean_norm(ip_run.table.user) - initial);
    CHECK(drift_cos < drift_ip);
}

TEST_CASE("config validation") {
    auto split = toy_split();
    auto cfg = base_config();
    cfg.dim = 0;
    CHECK_THROWS_AS(train(cfg, split), std::invalid_argument);
    cfg = base_config();
    cfg.patience = 0;
    CHECK_THROWS_AS(train(cfg, split), std::invalid_argument);
}
