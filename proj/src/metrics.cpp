#include "ssmrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ssmrec/parallel.hpp"

namespace ssmrec {

RankedList rank_items(std::span<const double> scores, const std::vector<char>& excluded, int k) {
    if (k < 1) throw std::invalid_argument("rank_items: k must be >= 1");
    RankedList out;
    std::vector<int> candidates;
    candidates.reserve(scores.size());
    for (int i = 0; i < static_cast<int>(scores.size()); ++i)
        if (excluded.empty() || !excluded[i]) candidates.push_back(i);

    auto better = [&](int a, int b) {
        return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
    };
    if (static_cast<int>(candidates.size()) <= k) {
        std::sort(candidates.begin(), candidates.end(), better);
        out.items = std::move(candidates);
        out.truncated = static_cast<int>(out.items.size()) < k;
        return out;
    }
    std::nth_element(candidates.begin(), candidates.begin() + k, candidates.end(), better);
    candidates.resize(k);
    std::sort(candidates.begin(), candidates.end(), better);
    out.items = std::move(candidates);
    return out;
}

namespace {

bool contains(std::span<const int> sorted, int value) {
    return std::binary_search(sorted.begin(), sorted.end(), value);
}

}  // namespace

double recall_at_k(const RankedList& ranked, std::span<const int> relevant, int k) {
    if (relevant.empty()) throw std::invalid_argument("recall_at_k: empty relevant set");
    int hits = 0;
    int limit = std::min<int>(k, static_cast<int>(ranked.items.size()));
    for (int r = 0; r < limit; ++r)
        if (contains(relevant, ranked.items[r])) ++hits;
    return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double ndcg_at_k(const RankedList& ranked, std::span<const int> relevant, int k) {
    if (relevant.empty()) throw std::invalid_argument("ndcg_at_k: empty relevant set");
    int limit = std::min<int>(k, static_cast<int>(ranked.items.size()));
    double dcg = 0.0;
    for (int r = 0; r < limit; ++r)
        if (contains(relevant, ranked.items[r])) dcg += 1.0 / std::log2(2.0 + r);
    double idcg = 0.0;
    int ideal = std::min<int>(k, static_cast<int>(relevant.size()));
    for (int r = 0; r < ideal; ++r) idcg += 1.0 / std::log2(2.0 + r);
    return dcg / idcg;
}

EvalReport evaluate(const Representations& z, const InteractionDataset& test,
                    const InteractionDataset& train, const InteractionDataset* extra_exclude,
                    const ItemGroups* groups, const EvalOptions& opts) {
    int num_users = z.user.rows();
    int num_items = z.item.rows();
    if (test.num_users() != num_users || test.num_items() != num_items)
        throw std::invalid_argument("evaluate: test split shape mismatch");

    int num_groups = groups != nullptr ? groups->num_groups : 0;

    // per-user results first, one ordered reduction afterwards: output is
    // bitwise independent of the worker count
    std::vector<char> valid(num_users, 0);
    std::vector<double> recall_u(num_users, 0.0), ndcg_u(num_users, 0.0);
    std::vector<double> group_u(static_cast<std::size_t>(num_users) * std::max(num_groups, 1), 0.0);
    std::vector<std::int64_t> zero_freq_u(num_users, 0);

    // pre-normalize once for cosine scoring
    std::vector<double> item_norm;
    if (opts.similarity == SimilarityKind::kCosine) {
        item_norm.resize(num_items);
        for (int i = 0; i < num_items; ++i) item_norm[i] = norm2(z.item.row(i));
    }

    parallel_chunks(num_users, [&](std::int64_t begin, std::int64_t end, int) {
        std::vector<double> scores(num_items);
        std::vector<char> excluded(num_items);

        for (int u = static_cast<int>(begin); u < static_cast<int>(end); ++u) {
            auto relevant = test.items_of(u);
            if (relevant.empty()) continue;
            auto zu = z.user.row(u);
            if (opts.similarity == SimilarityKind::kInnerProduct) {
                for (int i = 0; i < num_items; ++i) scores[i] = dot(zu, z.item.row(i));
            } else {
                double nu = norm2(zu);
                for (int i = 0; i < num_items; ++i) {
                    double denom = nu * item_norm[i];
                    scores[i] = denom > 1e-12 ? dot(zu, z.item.row(i)) / denom : 0.0;
                }
            }
            std::fill(excluded.begin(), excluded.end(), 0);
            for (int i : train.items_of(u)) excluded[i] = 1;
            if (extra_exclude != nullptr)
                for (int i : extra_exclude->items_of(u)) excluded[i] = 1;

            RankedList ranked = rank_items(scores, excluded, opts.k);
            ranked.user = u;

            double inv_rel = 1.0 / static_cast<double>(relevant.size());
            int hits = 0;
            double dcg = 0.0;
            int limit = std::min<int>(opts.k, static_cast<int>(ranked.items.size()));
            for (int r = 0; r < limit; ++r) {
                int item = ranked.items[r];
                if (!contains(relevant, item)) continue;
                ++hits;
                dcg += 1.0 / std::log2(2.0 + r);
                if (num_groups > 0)
                    group_u[static_cast<std::size_t>(u) * num_groups +
                            groups->group_of_item[item]] += inv_rel;
            }
            // items never seen in training land in the least-popular group
            for (int i : relevant)
                if (train.item_degree(i) == 0) ++zero_freq_u[u];

            double idcg = 0.0;
            int ideal = std::min<int>(opts.k, static_cast<int>(relevant.size()));
            for (int r = 0; r < ideal; ++r) idcg += 1.0 / std::log2(2.0 + r);

            recall_u[u] = hits * inv_rel;
            ndcg_u[u] = dcg / idcg;
            valid[u] = 1;
        }
    });

    EvalReport report;
    report.k = opts.k;
    report.group_recall.assign(num_groups, 0.0);
    double recall_sum = 0.0, ndcg_sum = 0.0;
    for (int u = 0; u < num_users; ++u) {
        report.zero_frequency_test_items += zero_freq_u[u];
        if (!valid[u]) {
            if (!test.items_of(u).empty()) continue;
            ++report.users_skipped;
            continue;
        }
        recall_sum += recall_u[u];
        ndcg_sum += ndcg_u[u];
        ++report.users_evaluated;
        for (int g = 0; g < num_groups; ++g)
            report.group_recall[g] += group_u[static_cast<std::size_t>(u) * num_groups + g];
    }
    if (report.users_evaluated > 0) {
        double inv = 1.0 / static_cast<double>(report.users_evaluated);
        report.recall = recall_sum * inv;
        report.ndcg = ndcg_sum * inv;
        for (double& g : report.group_recall) g *= inv;
    }
    return report;
}

}  // namespace ssmrec
