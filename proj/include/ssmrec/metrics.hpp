#pragma once

#include <span>
#include <vector>

#include "ssmrec/dataset.hpp"
#include "ssmrec/loss.hpp"
#include "ssmrec/model.hpp"

namespace ssmrec {

struct RankedList {
    int user = -1;
    std::vector<int> items;  // descending score, ties by ascending item id
    bool truncated = false;  // fewer than K candidates survived exclusion
};

struct EvalReport {
    double recall = 0.0;
    double ndcg = 0.0;
    std::vector<double> group_recall;  // empty when no grouping was requested
    int k = 0;
    std::int64_t users_evaluated = 0;
    std::int64_t users_skipped = 0;           // empty test set
    std::int64_t zero_frequency_test_items = 0;  // test items unseen in training
};

struct EvalOptions {
    int k = 20;
    SimilarityKind similarity = SimilarityKind::kInnerProduct;
};

// Top-K by score with ties broken by ascending item id; excluded ids never
// appear. Returns everything (flagged) when fewer than K candidates remain.
RankedList rank_items(std::span<const double> scores, const std::vector<char>& excluded, int k);

// |top-K intersect relevant| / |relevant|; relevant must be sorted and non-empty.
double recall_at_k(const RankedList& ranked, std::span<const int> relevant, int k);

// Binary-gain DCG@K with log2(1+rank) discounts, normalized by the ideal
// placement of min(|relevant|, K) items.
double ndcg_at_k(const RankedList& ranked, std::span<const int> relevant, int k);

// All-ranking evaluation of final representations against the test split.
// Candidates exclude each user's training items plus, when given, the items
// in extra_exclude (the validation split when scoring the test set). Groups
// are optional; when given, group_recall sums to recall.
EvalReport evaluate(const Representations& z, const InteractionDataset& test,
                    const InteractionDataset& train, const InteractionDataset* extra_exclude,
                    const ItemGroups* groups, const EvalOptions& opts);

}  // namespace ssmrec
