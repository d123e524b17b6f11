#include "ssmrec/trainer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ssmrec {

namespace {

void adam_update(Matrix& theta, const Matrix& grad, Matrix& m, Matrix& v, double lr, double b1,
                 double b2, double eps, std::int64_t t, double l2) {
    double bc1 = 1.0 - std::pow(b1, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(b2, static_cast<double>(t));
    auto& th = theta.data();
    const auto& g = grad.data();
    auto& md = m.data();
    auto& vd = v.data();
    for (std::size_t k = 0; k < th.size(); ++k) {
        double gk = g[k] + l2 * th[k];
        if (!std::isfinite(gk)) throw std::runtime_error("adam_step: non-finite gradient");
        md[k] = b1 * md[k] + (1.0 - b1) * gk;
        vd[k] = b2 * vd[k] + (1.0 - b2) * gk * gk;
        double mhat = md[k] / bc1;
        double vhat = vd[k] / bc2;
        th[k] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

void validate(const TrainConfig& cfg) {
    if (cfg.dim < 1) throw std::invalid_argument("dim must be positive");
    if (!(cfg.learning_rate > 0)) throw std::invalid_argument("learning_rate must be positive");
    if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be positive");
    if (cfg.max_epochs < 1) throw std::invalid_argument("max_epochs must be positive");
    if (cfg.eval_every < 1) throw std::invalid_argument("eval_every must be positive");
    if (cfg.patience < 1) throw std::invalid_argument("patience must be >= 1");
    if (cfg.l2_coeff < 0) throw std::invalid_argument("l2_coeff must be >= 0");
}

}  // namespace

void adam_step(EmbeddingTable& params, const EmbeddingTable& grads, AdamState& state, double lr,
               double l2_coeff) {
    if (params.user.rows() != grads.user.rows() || params.item.rows() != grads.item.rows() ||
        params.dim() != grads.dim())
        throw std::invalid_argument("adam_step: shape mismatch");
    ++state.step;
    adam_update(params.user, grads.user, state.m_user, state.v_user, lr, state.beta1, state.beta2,
                state.epsilon, state.step, l2_coeff);
    adam_update(params.item, grads.item, state.m_item, state.v_item, lr, state.beta1, state.beta2,
                state.epsilon, state.step, l2_coeff);
}

TrainResult train(const TrainConfig& cfg, const DatasetSplit& split) {
    validate(cfg);
    const InteractionDataset& train_ds = split.train;
    if (train_ds.interaction_count() == 0) throw std::invalid_argument("empty training split");

    EmbeddingTable emb = init_xavier(train_ds.num_users(), train_ds.num_items(), cfg.dim, cfg.seed);
    AdamState state(train_ds.num_users(), train_ds.num_items(), cfg.dim);

    std::vector<std::pair<int, int>> interactions = train_ds.all_pairs();
    Rng shuffle_rng = Rng::stream(cfg.seed, 0x53485546);

    TrainResult result;
    result.table = emb;
    TrainHistory& history = result.history;
    int evals_without_improvement = 0;
    bool has_validation = split.validation.interaction_count() > 0;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        shuffle_rng.shuffle(interactions);
        Rng sampler_rng = Rng::stream(cfg.sampler.seed, static_cast<std::uint64_t>(epoch));

        double loss_sum = 0.0;
        int batches = 0;
        for (std::size_t start = 0; start < interactions.size(); start += cfg.batch_size) {
            std::size_t stop = std::min(interactions.size(), start + cfg.batch_size);
            Batch batch;
            for (std::size_t k = start; k < stop; ++k) {
                batch.users.push_back(interactions[k].first);
                batch.items.push_back(interactions[k].second);
            }
            if (cfg.loss.kind == LossKind::kSM) {
                batch.negatives.assign(batch.size(), {});
            } else if (cfg.sampler.strategy == SamplerStrategy::kInBatch && batch.size() >= 2) {
                batch.negatives = in_batch_negatives(batch.items);
            } else {
                int n = cfg.loss.kind == LossKind::kBCE ? cfg.sampler.bce_negative_ratio
                        : cfg.loss.kind == LossKind::kBPR ? 1
                                                          : cfg.sampler.negatives_per_positive;
                batch.negatives.reserve(batch.size());
                for (std::size_t k = 0; k < batch.size(); ++k)
                    batch.negatives.push_back(
                        sample_uniform(batch.users[k], n, train_ds, sampler_rng));
            }

            Representations z = forward(cfg.model, emb, train_ds);
            LossGrad lg = loss_with_grad(cfg.loss, batch, z);
            if (!std::isfinite(lg.value))
                throw std::runtime_error("training diverged at epoch " + std::to_string(epoch) +
                                         ", batch " + std::to_string(batches));
            EmbeddingTable grad = backward(cfg.model, train_ds, lg.grad);
            adam_step(emb, grad, state, cfg.learning_rate, cfg.l2_coeff);

            loss_sum += lg.value;
            ++batches;
        }
        history.epoch_loss.push_back(loss_sum / batches);
        history.epochs_run = epoch;

        if (epoch % cfg.eval_every != 0) continue;
        if (!has_validation) continue;

        Representations z = forward(cfg.model, emb, train_ds);
        EvalOptions opts;
        opts.k = cfg.eval_k;
        opts.similarity = cfg.eval_similarity;
        EvalReport report = evaluate(z, split.validation, train_ds, nullptr, nullptr, opts);
        history.evals.push_back({epoch, report.recall, report.ndcg});

        if (history.best_epoch < 0 || report.recall > history.best_recall) {
            history.best_recall = report.recall;
            history.best_epoch = epoch;
            result.table = emb;
            evals_without_improvement = 0;
        } else {
            ++evals_without_improvement;
            if (evals_without_improvement >= cfg.patience) break;
        }
    }

    if (history.best_epoch < 0) {
        // no validation pass happened; return the final parameters
        result.table = emb;
        history.best_epoch = history.epochs_run;
    }
    return result;
}

}  // namespace ssmrec
