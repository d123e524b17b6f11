#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ssmrec {

// Immutable user-item interaction graph stored as CSR adjacency on both
// sides. Ids are dense and 0-based; item lists per user (and user lists per
// item) are sorted ascending.
class InteractionDataset {
public:
    InteractionDataset() = default;

    // pairs must be unique (duplicates are an error; the file loader dedups
    // before calling). Ids must lie in [0, num_users) x [0, num_items).
    static InteractionDataset from_pairs(int num_users, int num_items,
                                         std::vector<std::pair<int, int>> pairs);

    int num_users() const { return num_users_; }
    int num_items() const { return num_items_; }
    std::int64_t interaction_count() const { return static_cast<std::int64_t>(user_items_.size()); }

    std::span<const int> items_of(int user) const {
        return {user_items_.data() + user_offsets_[user],
                static_cast<std::size_t>(user_offsets_[user + 1] - user_offsets_[user])};
    }
    std::span<const int> users_of(int item) const {
        return {item_users_.data() + item_offsets_[item],
                static_cast<std::size_t>(item_offsets_[item + 1] - item_offsets_[item])};
    }

    int user_degree(int user) const {
        return static_cast<int>(user_offsets_[user + 1] - user_offsets_[user]);
    }
    int item_degree(int item) const {
        return static_cast<int>(item_offsets_[item + 1] - item_offsets_[item]);
    }

    bool has_interaction(int user, int item) const;

    std::vector<std::pair<int, int>> all_pairs() const;

    friend bool operator==(const InteractionDataset& a, const InteractionDataset& b) = default;

private:
    int num_users_ = 0;
    int num_items_ = 0;
    std::vector<std::int64_t> user_offsets_{0};
    std::vector<int> user_items_;
    std::vector<std::int64_t> item_offsets_{0};
    std::vector<int> item_users_;
};

struct DatasetStats {
    std::int64_t users = 0;
    std::int64_t items = 0;
    std::int64_t interactions = 0;
    double density = 0.0;
};

struct DatasetSplit {
    InteractionDataset train;
    InteractionDataset validation;
    InteractionDataset test;
};

// Popularity groups over items, ascending by training frequency. Group
// masses (summed item frequencies) are balanced up to one boundary item.
struct ItemGroups {
    int num_groups = 0;
    std::vector<int> group_of_item;        // item id -> group id in [0, num_groups)
    std::vector<std::int64_t> group_mass;  // per-group summed frequency
};

enum class FileFormat {
    kPairList,   // one "user item" pair per line
    kAdjacency,  // "user item item ..." per line
};

struct LoadResult {
    InteractionDataset dataset;
    // new dense id -> original id from the file
    std::vector<std::int64_t> user_ids;
    std::vector<std::int64_t> item_ids;
    std::int64_t duplicates_dropped = 0;
};

struct KcoreResult {
    InteractionDataset dataset;
    // new dense id -> id in the input dataset
    std::vector<int> kept_users;
    std::vector<int> kept_items;
};

// Parses a whitespace-separated interaction file and re-indexes ids to a
// dense 0-based range (in order of first appearance). Duplicate pairs are
// dropped and counted. Throws std::runtime_error with the line number on
// malformed rows and on empty files.
LoadResult load_interactions(const std::string& path, FileFormat format);

// Iteratively removes users and items of degree < k until every remaining
// node has degree >= k. The result is re-indexed; kept_* map back to the
// input ids. An empty result is valid.
KcoreResult kcore_filter(const InteractionDataset& ds, int k);

// Per-user 7:1:2 split: floor(0.7*|P_u|) train, floor(0.1*|P_u|) validation,
// remainder test. Every user must have at least one interaction.
DatasetSplit split_dataset(const InteractionDataset& ds, std::uint64_t seed);

DatasetStats compute_stats(const InteractionDataset& ds);

// Items sorted ascending by frequency (ties by id); greedy fill advances to
// the next group once the running mass reaches interactions/num_groups.
// The boundary item stays in the earlier group; the last group takes the
// remainder.
ItemGroups partition_item_groups(const InteractionDataset& train, int num_groups = 10);

// Seeded synthetic dataset with Pareto-skewed item popularity and user
// degrees; used by tests and as a quick-start fixture.
InteractionDataset synthetic_pareto(int num_users, int num_items, double alpha,
                                    std::uint64_t seed);

// Persists "new_id original_id" rows, one per line.
void save_id_map(const std::vector<std::int64_t>& ids, const std::string& path);

}  // namespace ssmrec
