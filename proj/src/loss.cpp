#include "ssmrec/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ssmrec {

namespace {

constexpr double kNormEps = 1e-12;

double sigmoid(double x) {
    return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

// log(1 + e^x) without overflow
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace

double ssm_term(double pos_score, std::span<const double> neg_scores, double& d_pos,
                std::span<double> d_neg) {
    if (neg_scores.empty()) throw std::invalid_argument("ssm_term: empty negative list");
    double m = pos_score;
    for (double s : neg_scores) m = std::max(m, s);
    double denom = std::exp(pos_score - m);
    for (double s : neg_scores) denom += std::exp(s - m);
    double log_denom = m + std::log(denom);

    double p_pos = std::exp(pos_score - log_denom);
    d_pos = p_pos - 1.0;
    for (std::size_t j = 0; j < neg_scores.size(); ++j)
        d_neg[j] = std::exp(neg_scores[j] - log_denom);
    return log_denom - pos_score;
}

double bpr_term(double pos_score, double neg_score, double& d_pos, double& d_neg) {
    double s = sigmoid(neg_score - pos_score);
    d_pos = -s;
    d_neg = s;
    return softplus(neg_score - pos_score);
}

double bce_term(double pos_score, std::span<const double> neg_scores, double& d_pos,
                std::span<double> d_neg) {
    double loss = softplus(-pos_score);
    d_pos = sigmoid(pos_score) - 1.0;
    for (std::size_t j = 0; j < neg_scores.size(); ++j) {
        loss += softplus(neg_scores[j]);
        d_neg[j] = sigmoid(neg_scores[j]);
    }
    return loss;
}

double sm_term(std::span<const double> catalog_scores, int positive_index,
               std::span<double> d_scores) {
    if (catalog_scores.empty()) throw std::invalid_argument("sm_term: missing catalog scores");
    double m = catalog_scores[0];
    for (double s : catalog_scores) m = std::max(m, s);
    double denom = 0.0;
    for (double s : catalog_scores) denom += std::exp(s - m);
    double log_denom = m + std::log(denom);
    for (std::size_t j = 0; j < catalog_scores.size(); ++j)
        d_scores[j] = std::exp(catalog_scores[j] - log_denom);
    d_scores[positive_index] -= 1.0;
    return log_denom - catalog_scores[positive_index];
}

double ccl_term(double pos_score, std::span<const double> neg_scores, double margin,
                double weight, double& d_pos, std::span<double> d_neg) {
    if (neg_scores.empty()) throw std::invalid_argument("ccl_term: empty negative list");
    double inv = weight / static_cast<double>(neg_scores.size());
    double loss = 1.0 - pos_score;
    d_pos = -1.0;
    for (std::size_t j = 0; j < neg_scores.size(); ++j) {
        if (neg_scores[j] > margin) {
            loss += inv * (neg_scores[j] - margin);
            d_neg[j] = inv;
        } else {
            d_neg[j] = 0.0;
        }
    }
    return loss;
}

double similarity(std::span<const double> z_u, std::span<const double> z_i,
                  SimilarityKind kind, double tau) {
    for (double v : z_u)
        if (!std::isfinite(v)) throw std::invalid_argument("similarity: non-finite input");
    for (double v : z_i)
        if (!std::isfinite(v)) throw std::invalid_argument("similarity: non-finite input");
    double ip = dot(z_u, z_i);
    if (kind == SimilarityKind::kInnerProduct) return ip;
    double nu = norm2(z_u), ni = norm2(z_i);
    if (nu < kNormEps || ni < kNormEps) return 0.0;
    return ip / (nu * ni * tau);
}

void similarity_backward(std::span<const double> z_u, std::span<const double> z_i,
                         SimilarityKind kind, double tau, double coeff,
                         std::span<double> grad_u, std::span<double> grad_i) {
    if (kind == SimilarityKind::kInnerProduct) {
        axpy(coeff, z_i, grad_u);
        axpy(coeff, z_u, grad_i);
        return;
    }
    double nu = norm2(z_u), ni = norm2(z_i);
    if (nu < kNormEps || ni < kNormEps) return;  // zero direction, zero gradient
    double x = dot(z_u, z_i) / (nu * ni);
    // df/dz_u = (s_i - x s_u) / (tau |z_u|)
    double cu = coeff / (tau * nu);
    double ci = coeff / (tau * ni);
    for (std::size_t k = 0; k < z_u.size(); ++k) {
        double su = z_u[k] / nu;
        double si = z_i[k] / ni;
        grad_u[k] += cu * (si - x * su);
        grad_i[k] += ci * (su - x * si);
    }
}

double effective_temperature(const LossConfig& cfg) {
    if (cfg.similarity == SimilarityKind::kCosine && cfg.kind != LossKind::kCCL) {
        if (!(cfg.temperature > 0)) throw std::invalid_argument("temperature must be > 0");
        return cfg.temperature;
    }
    return 1.0;
}

namespace {

struct ScoreCtx {
    const Representations& z;
    SimilarityKind sim;
    double tau;

    double score(int u, int i) const { return similarity(z.user.row(u), z.item.row(i), sim, tau); }
};

// Shared walk over the batch; grad == nullptr computes the value only.
double run_loss(const LossConfig& cfg, const Batch& batch, const Representations& z,
                LossGrad* out) {
    if (batch.users.size() != batch.items.size())
        throw std::invalid_argument("batch users/items size mismatch");
    if (cfg.kind != LossKind::kSM && batch.negatives.size() != batch.users.size())
        throw std::invalid_argument("batch negatives size mismatch");
    if (batch.users.empty()) throw std::invalid_argument("empty batch");

    ScoreCtx ctx{z, cfg.similarity, effective_temperature(cfg)};
    int num_items = z.item.rows();
    std::size_t B = batch.size();

    // normalizer: mean over anchors, except BCE which averages over samples
    double inv_norm;
    if (cfg.kind == LossKind::kBCE) {
        std::size_t total = 0;
        for (const auto& negs : batch.negatives) {
            if (negs.empty()) throw std::invalid_argument("bce requires negatives per anchor");
            total += 1 + negs.size();
        }
        inv_norm = 1.0 / static_cast<double>(total);
    } else {
        inv_norm = 1.0 / static_cast<double>(B);
    }

    double total_loss = 0.0;
    int empty_anchors = 0;
    std::vector<double> neg_scores, d_neg, catalog, d_catalog;

    auto chain = [&](int u, int i, double coeff) {
        if (out == nullptr || coeff == 0.0) return;
        similarity_backward(z.user.row(u), z.item.row(i), cfg.similarity, ctx.tau, coeff,
                            out->grad.user.row(u), out->grad.item.row(i));
    };

    for (std::size_t b = 0; b < B; ++b) {
        int u = batch.users[b];
        int i = batch.items[b];

        if (cfg.kind == LossKind::kSM) {
            catalog.resize(num_items);
            d_catalog.assign(num_items, 0.0);
            for (int j = 0; j < num_items; ++j) catalog[j] = ctx.score(u, j);
            total_loss += sm_term(catalog, i, d_catalog) * inv_norm;
            for (int j = 0; j < num_items; ++j) chain(u, j, d_catalog[j] * inv_norm);
            continue;
        }

        const auto& negs = batch.negatives[b];
        if (negs.empty()) {
            if (cfg.kind == LossKind::kSSM) {
                ++empty_anchors;  // collision with every other in-batch item
                continue;
            }
            throw std::invalid_argument("empty negative list for anchor");
        }
        if (cfg.kind == LossKind::kBPR && negs.size() != 1)
            throw std::invalid_argument("bpr requires exactly one negative per anchor");

        double pos = ctx.score(u, i);
        neg_scores.resize(negs.size());
        d_neg.assign(negs.size(), 0.0);
        for (std::size_t j = 0; j < negs.size(); ++j) neg_scores[j] = ctx.score(u, negs[j]);

        double d_pos = 0.0, term = 0.0;
        switch (cfg.kind) {
            case LossKind::kSSM:
                term = ssm_term(pos, neg_scores, d_pos, d_neg);
                break;
            case LossKind::kBPR:
                term = bpr_term(pos, neg_scores[0], d_pos, d_neg[0]);
                break;
            case LossKind::kBCE:
                term = bce_term(pos, neg_scores, d_pos, d_neg);
                break;
            case LossKind::kCCL:
                term = ccl_term(pos, neg_scores, cfg.ccl_margin, cfg.ccl_weight, d_pos, d_neg);
                break;
            case LossKind::kSM:
                break;  // handled above
        }
        total_loss += term * inv_norm;
        chain(u, i, d_pos * inv_norm);
        for (std::size_t j = 0; j < negs.size(); ++j) chain(u, negs[j], d_neg[j] * inv_norm);
    }

    if (out != nullptr) {
        out->value = total_loss;
        out->empty_negative_anchors = empty_anchors;
    }
    return total_loss;
}

}  // namespace

double loss_value(const LossConfig& cfg, const Batch& batch, const Representations& z) {
    return run_loss(cfg, batch, z, nullptr);
}

LossGrad loss_with_grad(const LossConfig& cfg, const Batch& batch, const Representations& z) {
    LossGrad out;
    out.grad.user = Matrix(z.user.rows(), z.user.cols());
    out.grad.item = Matrix(z.item.rows(), z.item.cols());
    run_loss(cfg, batch, z, &out);
    return out;
}

}  // namespace ssmrec
