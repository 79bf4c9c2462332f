#include "commoneval/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace commoneval {

namespace {

bool relevant(const Qrels& q, const UserId& u, const ItemId& i) {
    return q.grade(u, i) >= 1;
}

// Number of relevant judged items for the user.
int relevant_count(const Qrels& q, const UserId& u) {
    auto it = q.judgments.find(u);
    if (it == q.judgments.end()) return 0;
    int n = 0;
    for (const auto& [item, g] : it->second)
        if (g >= 1) ++n;
    return n;
}

std::vector<ItemId> relevant_items(const Qrels& q, const UserId& u) {
    std::vector<ItemId> out;
    auto it = q.judgments.find(u);
    if (it == q.judgments.end()) return out;
    for (const auto& [item, g] : it->second)
        if (g >= 1) out.push_back(item);
    std::sort(out.begin(), out.end());
    return out;
}

double log2_discount(int rank) { return 1.0 / std::log2(static_cast<double>(rank) + 1.0); }

std::map<ItemId, std::vector<CategoryId>> invert(const CategoryIndex& idx) {
    std::map<ItemId, std::vector<CategoryId>> m;
    for (const auto& [c, items] : idx.categories)
        for (const auto& item : items) m[item].push_back(c);
    return m;
}

}  // namespace

double ndcg(const Ranking& r, const Qrels& q, int k) {
    if (k < 1) throw DomainError("cutoff must be >= 1");
    const int n_rel = relevant_count(q, r.user);
    if (n_rel == 0) return 0.0;
    const int depth = std::min<int>(k, static_cast<int>(r.items.size()));
    double dcg = 0.0;
    for (int i = 0; i < depth; ++i)
        if (relevant(q, r.user, r.items[i])) dcg += log2_discount(i + 1);
    double ideal = 0.0;
    for (int i = 1; i <= std::min(k, n_rel); ++i) ideal += log2_discount(i);
    return dcg / ideal;
}

double reciprocal_rank(const Ranking& r, const Qrels& q) {
    for (std::size_t i = 0; i < r.items.size(); ++i)
        if (relevant(q, r.user, r.items[i])) return 1.0 / static_cast<double>(i + 1);
    return 0.0;
}

double alpha_ndcg(const Ranking& r, const Qrels& q, const CategoryIndex& idx,
                  double alpha, int k) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must be in (0,1)");
    if (k < 1) throw DomainError("cutoff must be >= 1");
    if (relevant_count(q, r.user) == 0) return 0.0;

    const auto item_cats = invert(idx);
    auto gain = [&](const ItemId& item, std::map<CategoryId, int>& seen, bool commit) {
        auto it = item_cats.find(item);
        if (it == item_cats.end()) return 0.0;
        double g = 0.0;
        for (const auto& c : it->second) {
            g += std::pow(1.0 - alpha, seen[c]);
            if (commit) ++seen[c];
        }
        return g;
    };

    const int depth = std::min<int>(k, static_cast<int>(r.items.size()));
    double dcg = 0.0;
    {
        std::map<CategoryId, int> seen;
        for (int i = 0; i < depth; ++i) {
            if (!relevant(q, r.user, r.items[i])) continue;
            dcg += gain(r.items[i], seen, true) * log2_discount(i + 1);
        }
    }

    // Greedy ideal over the user's relevant items; exact ideal is NP-hard.
    double ideal = 0.0;
    {
        std::vector<ItemId> pool = relevant_items(q, r.user);
        std::map<CategoryId, int> seen;
        const int picks = std::min<int>(k, static_cast<int>(pool.size()));
        for (int i = 0; i < picks; ++i) {
            double best_gain = -1.0;
            std::size_t best = 0;
            for (std::size_t j = 0; j < pool.size(); ++j) {
                std::map<CategoryId, int> tmp = seen;
                const double g = gain(pool[j], tmp, false);
                if (g > best_gain) {  // pool is sorted, so first max is the lexicographic tie-break
                    best_gain = g;
                    best = j;
                }
            }
            ideal += gain(pool[best], seen, true) * log2_discount(i + 1);
            pool.erase(pool.begin() + static_cast<long>(best));
        }
    }
    if (ideal == 0.0) return 0.0;
    return dcg / ideal;
}

double err_ia(const Ranking& r, const Qrels& q, const CategoryIndex& idx, int k) {
    if (k < 1) throw DomainError("cutoff must be >= 1");
    if (idx.categories.empty()) throw DomainError("no categories");
    const int depth = std::min<int>(k, static_cast<int>(r.items.size()));
    double total = 0.0;
    for (const auto& [c, items] : idx.categories) {
        double err = 0.0;
        double not_stopped = 1.0;
        for (int i = 0; i < depth; ++i) {
            // binary grades map to stop probability (2^g - 1) / 2^gmax = 1/2
            const double stop =
                (relevant(q, r.user, r.items[i]) && items.count(r.items[i])) ? 0.5 : 0.0;
            err += not_stopped * stop / static_cast<double>(i + 1);
            not_stopped *= 1.0 - stop;
        }
        total += err;
    }
    return total / static_cast<double>(idx.categories.size());
}

namespace {

template <typename Fn>
RunAverage average_over_users(const RunSet& run, const Qrels& q, Fn per_user) {
    RunAverage out;
    double sum = 0.0;
    for (const auto& [user, ranking] : run.rankings) {
        if (relevant_count(q, user) == 0) {
            ++out.n_skipped;
            continue;
        }
        sum += per_user(ranking);
        ++out.n_scored;
    }
    out.value = out.n_scored > 0 ? sum / out.n_scored : 0.0;
    return out;
}

double relative_std(const std::vector<double>& p) {
    double mean = 0.0;
    for (double v : p) mean += v;
    mean /= static_cast<double>(p.size());
    if (mean == 0.0) throw DomainError("undefined: all group exposure rates are zero");
    double var = 0.0;
    for (double v : p) var += (v - mean) * (v - mean);
    var /= static_cast<double>(p.size());
    return std::sqrt(var) / mean;
}

}  // namespace

RunAverage average_ndcg(const RunSet& run, const Qrels& q, int k) {
    return average_over_users(run, q, [&](const Ranking& r) { return ndcg(r, q, k); });
}

RunAverage average_rr(const RunSet& run, const Qrels& q) {
    return average_over_users(run, q, [&](const Ranking& r) { return reciprocal_rank(r, q); });
}

RunAverage average_alpha_ndcg(const RunSet& run, const Qrels& q, const CategoryIndex& idx,
                              double alpha, int k) {
    return average_over_users(run, q,
                              [&](const Ranking& r) { return alpha_ndcg(r, q, idx, alpha, k); });
}

RunAverage average_err_ia(const RunSet& run, const Qrels& q, const CategoryIndex& idx, int k) {
    return average_over_users(run, q, [&](const Ranking& r) { return err_ia(r, q, idx, k); });
}

FairnessValue rsp(const RunSet& run, const CategoryIndex& groups, int k) {
    if (k < 1) throw DomainError("cutoff must be >= 1");
    if (groups.categories.empty()) throw DomainError("no groups");
    const double n_users = static_cast<double>(run.rankings.size());
    if (n_users == 0.0) throw DomainError("empty run");

    FairnessValue out;
    std::vector<double> p;
    for (const auto& [g, items] : groups.categories) {
        long long hits = 0;
        for (const auto& [user, ranking] : run.rankings) {
            const int depth = std::min<int>(k, static_cast<int>(ranking.items.size()));
            for (int i = 0; i < depth; ++i)
                if (items.count(ranking.items[i])) ++hits;
        }
        const double pg = static_cast<double>(hits) /
                          (n_users * static_cast<double>(items.size()));
        out.per_group.emplace(g, pg);
        p.push_back(pg);
    }
    out.value = p.size() == 1 ? 0.0 : relative_std(p);
    return out;
}

FairnessValue reo(const RunSet& run, const Qrels& q, const CategoryIndex& groups, int k) {
    if (k < 1) throw DomainError("cutoff must be >= 1");
    if (groups.categories.empty()) throw DomainError("no groups");

    FairnessValue out;
    std::vector<double> p;
    for (const auto& [g, items] : groups.categories) {
        long long num = 0;
        long long den = 0;
        for (const auto& [user, ranking] : run.rankings) {
            for (const auto& item : items)
                if (relevant(q, user, item)) ++den;
            const int depth = std::min<int>(k, static_cast<int>(ranking.items.size()));
            for (int i = 0; i < depth; ++i)
                if (items.count(ranking.items[i]) && relevant(q, user, ranking.items[i])) ++num;
        }
        if (den == 0) {
            out.excluded_groups.push_back(g);
            continue;
        }
        const double pg = static_cast<double>(num) / static_cast<double>(den);
        out.per_group.emplace(g, pg);
        p.push_back(pg);
    }
    if (p.empty()) throw DomainError("undefined: every group has zero relevant items");
    out.value = p.size() == 1 ? 0.0 : relative_std(p);
    return out;
}

}  // namespace commoneval
