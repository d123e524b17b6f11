#pragma once

#include <span>
#include <vector>

#include "ssmrec/model.hpp"

namespace ssmrec {

enum class LossKind { kBCE, kBPR, kSM, kCCL, kSSM };
enum class SimilarityKind { kInnerProduct, kCosine };

struct LossConfig {
    LossKind kind = LossKind::kSSM;
    SimilarityKind similarity = SimilarityKind::kCosine;
    double temperature = 0.2;  // tau for SM/SSM under cosine
    double ccl_margin = 0.5;   // m
    double ccl_weight = 1.0;   // w
    double l2_coeff = 0.0;     // lambda, applied by the trainer at the embedding level
};

// Positives with per-anchor negative item lists. An empty negative list is
// only legal for SSM (an in-batch collision); the anchor then contributes
// zero loss and is counted.
struct Batch {
    std::vector<int> users;
    std::vector<int> items;
    std::vector<std::vector<int>> negatives;

    std::size_t size() const { return users.size(); }
};

// --- score-space kernels -------------------------------------------------
// Each returns the per-anchor loss term and writes d(term)/d(score).

// -log softmax of the positive against {positive} + negatives, max-shifted.
double ssm_term(double pos_score, std::span<const double> neg_scores, double& d_pos,
                std::span<double> d_neg);

// -log sigmoid(pos - neg)
double bpr_term(double pos_score, double neg_score, double& d_pos, double& d_neg);

// softplus(-pos) + sum softplus(neg); caller normalizes by the sample count.
double bce_term(double pos_score, std::span<const double> neg_scores, double& d_pos,
                std::span<double> d_neg);

// -log softmax over the whole catalog (scores include the positive entry).
double sm_term(std::span<const double> catalog_scores, int positive_index,
               std::span<double> d_scores);

// 1 - pos + (w/|N|) sum max(0, neg - m); hinge subgradient 0 at the kink.
double ccl_term(double pos_score, std::span<const double> neg_scores, double margin,
                double weight, double& d_pos, std::span<double> d_neg);

// --- similarity ----------------------------------------------------------

// inner product: <z_u, z_i>; cosine: <z_u, z_i>/(|z_u||z_i| tau). Vectors of
// norm < 1e-12 are treated as the zero direction (score 0, gradient 0).
double similarity(std::span<const double> z_u, std::span<const double> z_i,
                  SimilarityKind kind, double tau);

// grad_u += coeff * df/dz_u, grad_i += coeff * df/dz_i for the score above.
void similarity_backward(std::span<const double> z_u, std::span<const double> z_i,
                         SimilarityKind kind, double tau, double coeff,
                         std::span<double> grad_u, std::span<double> grad_i);

// CCL scores drop the temperature: raw cosine in [-1, 1] (or the raw inner
// product); every other loss uses the configured tau under cosine.
double effective_temperature(const LossConfig& cfg);

// --- batch-level API -----------------------------------------------------

struct LossGrad {
    double value = 0.0;
    Representations grad;         // same shapes as the input representations
    int empty_negative_anchors = 0;
};

// Mean loss over the batch (BCE normalizes by the total sample count).
double loss_value(const LossConfig& cfg, const Batch& batch, const Representations& z);

// Loss plus analytic gradients with respect to the final representations.
LossGrad loss_with_grad(const LossConfig& cfg, const Batch& batch, const Representations& z);

}  // namespace ssmrec
