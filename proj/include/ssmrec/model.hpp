#pragma once

#include "ssmrec/dataset.hpp"
#include "ssmrec/embedding.hpp"

namespace ssmrec {

enum class ModelKind { kMF, kSVDppUser, kSVDppItem, kLightGCN };

struct RecommenderConfig {
    ModelKind kind = ModelKind::kMF;
    double alpha0 = 0.5;  // degree exponent on the aggregation target
    double alpha1 = 0.0;  // degree exponent on the source
    int layers = 0;       // K, LightGCN only (K = 0 degenerates to MF)
};

struct Representations {
    Matrix user;  // M x d
    Matrix item;  // N x d
};

enum class Direction { kUserToItem, kItemToUser };

// One degree-normalized aggregation step: with direction user->item, item i
// receives sum over u in P_i of source_u / (|P_i|^a0 * |P_u|^a1). Targets of
// degree zero receive the zero vector.
Matrix propagate(const InteractionDataset& graph, const Matrix& source, Direction direction,
                 double alpha0, double alpha1);

// Final representations:
//   MF:        z = embeddings
//   SVD++user: z_u = p_u + aggregate(item->user of q), z_i = q_i
//   SVD++item: mirror image on the item side
//   LightGCN:  K alternating bilateral propagations with a0 = a1 = 0.5,
//              averaged over layers 0..K with coefficient 1/(K+1).
// SVD++ propagates the layer-0 embeddings; LightGCN propagates the previous
// layer's output.
Representations forward(const RecommenderConfig& cfg, const EmbeddingTable& emb,
                        const InteractionDataset& graph);

// Adjoint of forward: pulls representation-shaped gradients back to the
// embedding tables. Propagation is linear, so the adjoint is propagation in
// the reverse direction with the per-edge coefficients unchanged.
EmbeddingTable backward(const RecommenderConfig& cfg, const InteractionDataset& graph,
                        const Representations& grad_repr);

}  // namespace ssmrec
