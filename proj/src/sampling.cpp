#include "ssmrec/sampling.hpp"

#include <stdexcept>

namespace ssmrec {

std::vector<int> sample_uniform(int user, int n, const InteractionDataset& train, Rng& rng) {
    if (train.user_degree(user) >= train.num_items())
        throw std::invalid_argument("sample_uniform: user has interacted with every item");
    std::vector<int> out;
    out.reserve(n);
    while (static_cast<int>(out.size()) < n) {
        int item = rng.uniform_int(train.num_items());
        if (!train.has_interaction(user, item)) out.push_back(item);
    }
    return out;
}

std::vector<std::vector<int>> in_batch_negatives(const std::vector<int>& batch_items) {
    if (batch_items.size() < 2)
        throw std::invalid_argument("in_batch_negatives: batch size must be >= 2");
    std::vector<std::vector<int>> out(batch_items.size());
    for (std::size_t a = 0; a < batch_items.size(); ++a) {
        out[a].reserve(batch_items.size() - 1);
        for (std::size_t b = 0; b < batch_items.size(); ++b) {
            if (b == a) continue;
            if (batch_items[b] == batch_items[a]) continue;
            out[a].push_back(batch_items[b]);
        }
    }
    return out;
}

}  // namespace ssmrec
