#include "ssmrec/model.hpp"

#include <cmath>
#include <stdexcept>

namespace ssmrec {

namespace {

std::vector<double> degree_pows(const InteractionDataset& g, bool users, double exponent) {
    int n = users ? g.num_users() : g.num_items();
    std::vector<double> p(n, 0.0);
    for (int v = 0; v < n; ++v) {
        int deg = users ? g.user_degree(v) : g.item_degree(v);
        if (deg > 0) p[v] = std::pow(static_cast<double>(deg), -exponent);
    }
    return p;
}

}  // namespace

Matrix propagate(const InteractionDataset& graph, const Matrix& source, Direction direction,
                 double alpha0, double alpha1) {
    bool to_items = direction == Direction::kUserToItem;
    int n_src = to_items ? graph.num_users() : graph.num_items();
    int n_tgt = to_items ? graph.num_items() : graph.num_users();
    if (source.rows() != n_src) throw std::invalid_argument("propagate: source row count mismatch");

    int d = source.cols();
    Matrix target(n_tgt, d);
    auto tgt_pow = degree_pows(graph, !to_items, alpha0);
    auto src_pow = degree_pows(graph, to_items, alpha1);

    for (int t = 0; t < n_tgt; ++t) {
        auto neighbors = to_items ? graph.users_of(t) : graph.items_of(t);
        if (neighbors.empty()) continue;
        auto out = target.row(t);
        for (int s : neighbors) axpy(tgt_pow[t] * src_pow[s], source.row(s), out);
    }
    return target;
}

Representations forward(const RecommenderConfig& cfg, const EmbeddingTable& emb,
                        const InteractionDataset& graph) {
    if (emb.user.rows() != graph.num_users() || emb.item.rows() != graph.num_items())
        throw std::invalid_argument("forward: embedding/graph shape mismatch");

    switch (cfg.kind) {
        case ModelKind::kMF:
            return {emb.user, emb.item};
        case ModelKind::kSVDppUser: {
            Matrix zu = propagate(graph, emb.item, Direction::kItemToUser, cfg.alpha0, cfg.alpha1);
            for (std::size_t k = 0; k < zu.data().size(); ++k) zu.data()[k] += emb.user.data()[k];
            return {std::move(zu), emb.item};
        }
        case ModelKind::kSVDppItem: {
            Matrix zi = propagate(graph, emb.user, Direction::kUserToItem, cfg.alpha0, cfg.alpha1);
            for (std::size_t k = 0; k < zi.data().size(); ++k) zi.data()[k] += emb.item.data()[k];
            return {emb.user, std::move(zi)};
        }
        case ModelKind::kLightGCN: {
            if (cfg.layers < 0) throw std::invalid_argument("LightGCN layer count must be >= 0");
            double coeff = 1.0 / (cfg.layers + 1);
            Matrix cur_u = emb.user, cur_i = emb.item;
            Representations z{Matrix(emb.user.rows(), emb.dim()), Matrix(emb.item.rows(), emb.dim())};
            auto accumulate = [coeff](Matrix& acc, const Matrix& layer) {
                for (std::size_t k = 0; k < acc.data().size(); ++k)
                    acc.data()[k] += coeff * layer.data()[k];
            };
            accumulate(z.user, cur_u);
            accumulate(z.item, cur_i);
            for (int k = 0; k < cfg.layers; ++k) {
                Matrix next_u = propagate(graph, cur_i, Direction::kItemToUser, 0.5, 0.5);
                Matrix next_i = propagate(graph, cur_u, Direction::kUserToItem, 0.5, 0.5);
                cur_u = std::move(next_u);
                cur_i = std::move(next_i);
                accumulate(z.user, cur_u);
                accumulate(z.item, cur_i);
            }
            return z;
        }
    }
    throw std::invalid_argument("unsupported recommender kind");
}

EmbeddingTable backward(const RecommenderConfig& cfg, const InteractionDataset& graph,
                        const Representations& grad_repr) {
    if (!grad_repr.user.all_finite() || !grad_repr.item.all_finite())
        throw std::invalid_argument("backward: non-finite representation gradient");

    switch (cfg.kind) {
        case ModelKind::kMF:
            return {grad_repr.user, grad_repr.item};
        case ModelKind::kSVDppUser: {
            // forward coefficient 1/(|P_u|^a0 |P_i|^a1); the adjoint runs
            // user->item with the exponents swapped onto the new roles.
            Matrix gi = propagate(graph, grad_repr.user, Direction::kUserToItem, cfg.alpha1, cfg.alpha0);
            for (std::size_t k = 0; k < gi.data().size(); ++k) gi.data()[k] += grad_repr.item.data()[k];
            return {grad_repr.user, std::move(gi)};
        }
        case ModelKind::kSVDppItem: {
            Matrix gu = propagate(graph, grad_repr.item, Direction::kItemToUser, cfg.alpha1, cfg.alpha0);
            for (std::size_t k = 0; k < gu.data().size(); ++k) gu.data()[k] += grad_repr.user.data()[k];
            return {std::move(gu), grad_repr.item};
        }
        case ModelKind::kLightGCN: {
            double coeff = 1.0 / (cfg.layers + 1);
            Matrix du(grad_repr.user.rows(), grad_repr.user.cols());
            Matrix di(grad_repr.item.rows(), grad_repr.item.cols());
            auto add_scaled = [coeff](Matrix& acc, const Matrix& g) {
                for (std::size_t k = 0; k < acc.data().size(); ++k)
                    acc.data()[k] += coeff * g.data()[k];
            };
            add_scaled(du, grad_repr.user);
            add_scaled(di, grad_repr.item);
            for (int k = cfg.layers; k >= 1; --k) {
                // layer k outputs came from layer k-1 via the symmetric 0.5/0.5 step
                Matrix prev_u = propagate(graph, di, Direction::kItemToUser, 0.5, 0.5);
                Matrix prev_i = propagate(graph, du, Direction::kUserToItem, 0.5, 0.5);
                du = std::move(prev_u);
                di = std::move(prev_i);
                add_scaled(du, grad_repr.user);
                add_scaled(di, grad_repr.item);
            }
            return {std::move(du), std::move(di)};
        }
    }
    throw std::invalid_argument("unsupported recommender kind");
}

}  // namespace ssmrec
