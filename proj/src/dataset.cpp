#include "ssmrec/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "ssmrec/rng.hpp"

namespace ssmrec {

InteractionDataset InteractionDataset::from_pairs(int num_users, int num_items,
                                                  std::vector<std::pair<int, int>> pairs) {
    InteractionDataset ds;
    ds.num_users_ = num_users;
    ds.num_items_ = num_items;
    for (auto [u, i] : pairs) {
        if (u < 0 || u >= num_users || i < 0 || i >= num_items)
            throw std::invalid_argument("interaction id out of range");
    }
    std::sort(pairs.begin(), pairs.end());
    for (std::size_t k = 1; k < pairs.size(); ++k) {
        if (pairs[k] == pairs[k - 1]) throw std::invalid_argument("duplicate interaction pair");
    }

    ds.user_offsets_.assign(num_users + 1, 0);
    ds.item_offsets_.assign(num_items + 1, 0);
    for (auto [u, i] : pairs) {
        ++ds.user_offsets_[u + 1];
        ++ds.item_offsets_[i + 1];
    }
    for (int u = 0; u < num_users; ++u) ds.user_offsets_[u + 1] += ds.user_offsets_[u];
    for (int i = 0; i < num_items; ++i) ds.item_offsets_[i + 1] += ds.item_offsets_[i];

    ds.user_items_.resize(pairs.size());
    ds.item_users_.resize(pairs.size());
    std::vector<std::int64_t> ucur(ds.user_offsets_.begin(), ds.user_offsets_.end() - 1);
    std::vector<std::int64_t> icur(ds.item_offsets_.begin(), ds.item_offsets_.end() - 1);
    for (auto [u, i] : pairs) {
        ds.user_items_[ucur[u]++] = i;
        ds.item_users_[icur[i]++] = u;  // pairs sorted by user, so lists stay sorted
    }
    return ds;
}

bool InteractionDataset::has_interaction(int user, int item) const {
    auto items = items_of(user);
    return std::binary_search(items.begin(), items.end(), item);
}

std::vector<std::pair<int, int>> InteractionDataset::all_pairs() const {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(user_items_.size());
    for (int u = 0; u < num_users_; ++u)
        for (int i : items_of(u)) pairs.emplace_back(u, i);
    return pairs;
}

namespace {

std::int64_t parse_id(std::string_view token, std::size_t line_no) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || value < 0)
        throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                 ": bad id token '" + std::string(token) + "'");
    return value;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace

LoadResult load_interactions(const std::string& path, FileFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open interaction file: " + path);

    LoadResult result;
    std::unordered_map<std::int64_t, int> user_map, item_map;
    std::vector<std::pair<int, int>> pairs;

    auto map_user = [&](std::int64_t raw) {
        auto [it, inserted] = user_map.try_emplace(raw, static_cast<int>(result.user_ids.size()));
        if (inserted) result.user_ids.push_back(raw);
        return it->second;
    };
    auto map_item = [&](std::int64_t raw) {
        auto [it, inserted] = item_map.try_emplace(raw, static_cast<int>(result.item_ids.size()));
        if (inserted) result.item_ids.push_back(raw);
        return it->second;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        if (format == FileFormat::kPairList) {
            if (tokens.size() != 2)
                throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                         ": expected 'user item'");
            int u = map_user(parse_id(tokens[0], line_no));
            int i = map_item(parse_id(tokens[1], line_no));
            pairs.emplace_back(u, i);
        } else {
            int u = map_user(parse_id(tokens[0], line_no));
            for (std::size_t t = 1; t < tokens.size(); ++t)
                pairs.emplace_back(u, map_item(parse_id(tokens[t], line_no)));
        }
    }
    if (result.user_ids.empty() || pairs.empty())
        throw std::runtime_error("interaction file is empty: " + path);

    std::sort(pairs.begin(), pairs.end());
    auto last = std::unique(pairs.begin(), pairs.end());
    result.duplicates_dropped = static_cast<std::int64_t>(pairs.end() - last);
    pairs.erase(last, pairs.end());

    result.dataset = InteractionDataset::from_pairs(static_cast<int>(result.user_ids.size()),
                                                    static_cast<int>(result.item_ids.size()),
                                                    std::move(pairs));
    return result;
}

KcoreResult kcore_filter(const InteractionDataset& ds, int k) {
    if (k < 1) throw std::invalid_argument("kcore_filter requires k >= 1");

    std::vector<int> udeg(ds.num_users()), ideg(ds.num_items());
    for (int u = 0; u < ds.num_users(); ++u) udeg[u] = ds.user_degree(u);
    for (int i = 0; i < ds.num_items(); ++i) ideg[i] = ds.item_degree(i);

    std::vector<char> user_dead(ds.num_users(), 0), item_dead(ds.num_items(), 0);
    // peel: each removal decrements neighbor degrees, cascading until fixpoint
    std::vector<int> uqueue, iqueue;
    for (int u = 0; u < ds.num_users(); ++u)
        if (udeg[u] < k) { user_dead[u] = 1; uqueue.push_back(u); }
    for (int i = 0; i < ds.num_items(); ++i)
        if (ideg[i] < k) { item_dead[i] = 1; iqueue.push_back(i); }

    while (!uqueue.empty() || !iqueue.empty()) {
        if (!uqueue.empty()) {
            int u = uqueue.back();
            uqueue.pop_back();
            for (int i : ds.items_of(u)) {
                if (item_dead[i]) continue;
                if (--ideg[i] < k) { item_dead[i] = 1; iqueue.push_back(i); }
            }
        } else {
            int i = iqueue.back();
            iqueue.pop_back();
            for (int u : ds.users_of(i)) {
                if (user_dead[u]) continue;
                if (--udeg[u] < k) { user_dead[u] = 1; uqueue.push_back(u); }
            }
        }
    }

    KcoreResult result;
    std::vector<int> new_user(ds.num_users(), -1), new_item(ds.num_items(), -1);
    for (int u = 0; u < ds.num_users(); ++u)
        if (!user_dead[u]) {
            new_user[u] = static_cast<int>(result.kept_users.size());
            result.kept_users.push_back(u);
        }
    for (int i = 0; i < ds.num_items(); ++i)
        if (!item_dead[i]) {
            new_item[i] = static_cast<int>(result.kept_items.size());
            result.kept_items.push_back(i);
        }

    std::vector<std::pair<int, int>> pairs;
    for (int u : result.kept_users)
        for (int i : ds.items_of(u))
            if (!item_dead[i]) pairs.emplace_back(new_user[u], new_item[i]);

    result.dataset = InteractionDataset::from_pairs(static_cast<int>(result.kept_users.size()),
                                                    static_cast<int>(result.kept_items.size()),
                                                    std::move(pairs));
    return result;
}

DatasetSplit split_dataset(const InteractionDataset& ds, std::uint64_t seed) {
    for (int u = 0; u < ds.num_users(); ++u)
        if (ds.user_degree(u) == 0)
            throw std::invalid_argument("split_dataset: user " + std::to_string(u) +
                                        " has no interactions");

    std::vector<std::pair<int, int>> train, val, test;
    for (int u = 0; u < ds.num_users(); ++u) {
        auto span = ds.items_of(u);
        std::vector<int> items(span.begin(), span.end());
        Rng rng = Rng::stream(seed, 0x53504c49u ^ static_cast<std::uint64_t>(u) << 1);
        rng.shuffle(items);
        std::size_t n = items.size();
        std::size_t n_train = (7 * n) / 10;  // floor(0.7 n), exact in integers
        std::size_t n_val = n / 10;          // floor(0.1 n)
        for (std::size_t idx = 0; idx < n; ++idx) {
            if (idx < n_train)
                train.emplace_back(u, items[idx]);
            else if (idx < n_train + n_val)
                val.emplace_back(u, items[idx]);
            else
                test.emplace_back(u, items[idx]);
        }
    }
    DatasetSplit split;
    split.train = InteractionDataset::from_pairs(ds.num_users(), ds.num_items(), std::move(train));
    split.validation = InteractionDataset::from_pairs(ds.num_users(), ds.num_items(), std::move(val));
    split.test = InteractionDataset::from_pairs(ds.num_users(), ds.num_items(), std::move(test));
    return split;
}

DatasetStats compute_stats(const InteractionDataset& ds) {
    DatasetStats stats;
    stats.users = ds.num_users();
    stats.items = ds.num_items();
    stats.interactions = ds.interaction_count();
    double cells = static_cast<double>(stats.users) * static_cast<double>(stats.items);
    stats.density = cells > 0 ? static_cast<double>(stats.interactions) / cells : 0.0;
    return stats;
}

ItemGroups partition_item_groups(const InteractionDataset& train, int num_groups) {
    if (num_groups < 1) throw std::invalid_argument("num_groups must be >= 1");
    if (num_groups > train.num_items())
        throw std::invalid_argument("num_groups exceeds the number of items");
    if (train.interaction_count() == 0)
        throw std::invalid_argument("partition_item_groups: empty training set");

    std::vector<int> order(train.num_items());
    for (int i = 0; i < train.num_items(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        int da = train.item_degree(a), db = train.item_degree(b);
        return da != db ? da < db : a < b;
    });

    ItemGroups groups;
    groups.num_groups = num_groups;
    groups.group_of_item.assign(train.num_items(), 0);
    groups.group_mass.assign(num_groups, 0);

    double target = static_cast<double>(train.interaction_count()) / num_groups;
    int g = 0;
    for (int item : order) {
        groups.group_of_item[item] = g;
        groups.group_mass[g] += train.item_degree(item);
        if (g < num_groups - 1 && static_cast<double>(groups.group_mass[g]) >= target) ++g;
    }
    return groups;
}

InteractionDataset synthetic_pareto(int num_users, int num_items, double alpha,
                                    std::uint64_t seed) {
    if (num_users < 1 || num_items < 1) throw std::invalid_argument("empty synthetic shape");

    // Item attractiveness and user activity both follow a power law.
    Rng wrng = Rng::stream(seed, 0x57454947);
    std::vector<double> log_weight(num_items);
    for (int i = 0; i < num_items; ++i) {
        double x = std::pow(wrng.uniform_open0(), -1.0 / alpha);
        log_weight[i] = std::log(x);
    }

    std::vector<std::pair<int, int>> pairs;
    std::vector<std::pair<double, int>> keys(num_items);
    for (int u = 0; u < num_users; ++u) {
        Rng rng = Rng::stream(seed, 0x55534552u + static_cast<std::uint64_t>(u));
        double raw = std::pow(rng.uniform_open0(), -1.0 / alpha);
        int degree = static_cast<int>(std::ceil(raw * 4.0));  // scale up for useful splits
        degree = std::min(std::max(degree, 1), num_items);
        // weighted sample without replacement via Gumbel keys
        for (int i = 0; i < num_items; ++i) {
            double gumbel = -std::log(-std::log(rng.uniform_open0()));
            keys[i] = {log_weight[i] + gumbel, i};
        }
        std::partial_sort(keys.begin(), keys.begin() + degree, keys.end(),
                          [](const auto& a, const auto& b) { return a.first > b.first; });
        for (int k = 0; k < degree; ++k) pairs.emplace_back(u, keys[k].second);
    }
    return InteractionDataset::from_pairs(num_users, num_items, std::move(pairs));
}

void save_id_map(const std::vector<std::int64_t>& ids, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write id map: " + path);
    for (std::size_t k = 0; k < ids.size(); ++k) out << k << ' ' << ids[k] << '\n';
}

}  // namespace ssmrec
