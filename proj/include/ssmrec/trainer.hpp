#pragma once

#include <cstdint>
#include <vector>

#include "ssmrec/dataset.hpp"
#include "ssmrec/embedding.hpp"
#include "ssmrec/loss.hpp"
#include "ssmrec/metrics.hpp"
#include "ssmrec/model.hpp"
#include "ssmrec/sampling.hpp"

namespace ssmrec {

struct TrainConfig {
    int dim = 64;
    double learning_rate = 0.001;
    int batch_size = 2048;
    int max_epochs = 100;
    int eval_every = 5;   // epochs between validation passes
    int patience = 10;    // non-improving validation passes before stopping
    double l2_coeff = 0.0;
    std::uint64_t seed = 0;
    int eval_k = 20;
    SimilarityKind eval_similarity = SimilarityKind::kInnerProduct;
    LossConfig loss;
    RecommenderConfig model;
    SamplerConfig sampler;
};

struct AdamState {
    Matrix m_user, v_user, m_item, v_item;
    std::int64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    AdamState() = default;
    AdamState(int num_users, int num_items, int dim)
        : m_user(num_users, dim), v_user(num_users, dim),
          m_item(num_items, dim), v_item(num_items, dim) {}
};

struct EvalPoint {
    int epoch = 0;
    double recall = 0.0;
    double ndcg = 0.0;
};

struct TrainHistory {
    std::vector<double> epoch_loss;  // mean batch loss per epoch
    std::vector<EvalPoint> evals;
    int best_epoch = -1;
    double best_recall = 0.0;
    int epochs_run = 0;
};

struct TrainResult {
    EmbeddingTable table;  // best checkpoint by validation recall
    TrainHistory history;
};

// Bias-corrected Adam over both tables; the L2 term lambda*theta is added to
// the gradients before the update. Throws on non-finite gradients.
void adam_step(EmbeddingTable& params, const EmbeddingTable& grads, AdamState& state, double lr,
               double l2_coeff);

// Mini-batch loop: shuffle interactions per epoch, sample negatives, full
// model forward, analytic gradients, Adam update; validation recall every
// eval_every epochs with best-checkpoint tracking and early stopping.
TrainResult train(const TrainConfig& cfg, const DatasetSplit& split);

}  // namespace ssmrec
