#pragma once

#include <cstdint>
#include <vector>

#include "ssmrec/dataset.hpp"
#include "ssmrec/rng.hpp"

namespace ssmrec {

enum class SamplerStrategy { kUniform, kInBatch };

struct SamplerConfig {
    SamplerStrategy strategy = SamplerStrategy::kInBatch;
    int negatives_per_positive = 1;  // ignored by in-batch (it is batch size - 1)
    int bce_negative_ratio = 4;      // negatives per positive for BCE
    std::uint64_t seed = 0;
};

// n items drawn uniformly (with replacement) from the complement of the
// user's training items. Throws if the user has interacted with everything.
std::vector<int> sample_uniform(int user, int n, const InteractionDataset& train, Rng& rng);

// Negatives for each anchor (u, i) are the other anchors' positive items,
// as a multiset, dropping only entries equal to i itself. Items the user has
// interacted with are deliberately kept: inclusion frequency then matches
// the empirical item frequency. An anchor whose list comes back empty had
// its item duplicated across the whole batch.
std::vector<std::vector<int>> in_batch_negatives(const std::vector<int>& batch_items);

}  // namespace ssmrec
