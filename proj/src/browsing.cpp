#include "commoneval/browsing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace commoneval {

double stop_probability(int rank, const StopModel& m) {
    if (rank < 1) throw DomainError("rank must be >= 1");
    return (1.0 - m.gamma) * std::pow(m.gamma, rank - 1);
}

double recall_at(const Ranking& r, int k, const ItemSet& category) {
    if (category.empty()) throw DomainError("empty category");
    if (k < 1) throw DomainError("cutoff must be >= 1");
    const int depth = std::min<int>(k, static_cast<int>(r.items.size()));
    int hits = 0;
    for (int i = 0; i < depth; ++i)
        if (category.count(r.items[i])) ++hits;
    return static_cast<double>(hits) / static_cast<double>(category.size());
}

RankedPositions::RankedPositions(const Ranking& r)
    : length(static_cast<int>(r.items.size())) {
    rank_of.reserve(r.items.size());
    for (int i = 0; i < length; ++i) rank_of.emplace(r.items[i], i + 1);
}

namespace {

// Step form of sum_i p(i) * Recall(r, i, c): each category hit at rank j
// contributes (gamma^(j-1) - T) / |c|, with T the unreached tail mass.
double familiarity_from_hits(const std::vector<int>& hit_ranks, int length,
                             std::size_t category_size, const StopModel& m,
                             TailPolicy tail) {
    const double tail_mass =
        tail == TailPolicy::PaperLiteral ? std::pow(m.gamma, length) : 0.0;
    double sum = 0.0;
    for (int j : hit_ranks) sum += std::pow(m.gamma, j - 1) - tail_mass;
    return sum / static_cast<double>(category_size);
}

}  // namespace

double familiarity(const RankedPositions& pos, const ItemSet& category,
                   const StopModel& m, TailPolicy tail) {
    if (category.empty()) throw DomainError("empty category");
    if (pos.length == 0) throw DomainError("empty ranking");
    std::vector<int> hits;
    hits.reserve(category.size());
    for (const auto& item : category) {
        auto it = pos.rank_of.find(item);
        if (it != pos.rank_of.end()) hits.push_back(it->second);
    }
    return familiarity_from_hits(hits, pos.length, category.size(), m, tail);
}

double familiarity(const Ranking& r, const ItemSet& category, const StopModel& m,
                   TailPolicy tail) {
    if (category.empty()) throw DomainError("empty category");
    if (r.items.empty()) throw DomainError("empty ranking");
    std::vector<int> hits;
    const int n = static_cast<int>(r.items.size());
    for (int i = 0; i < n; ++i)
        if (category.count(r.items[i])) hits.push_back(i + 1);
    return familiarity_from_hits(hits, n, category.size(), m, tail);
}

double log_familiarity(const RankedPositions& pos, const ItemSet& category,
                       const StopModel& m, TailPolicy tail) {
    const double f = familiarity(pos, category, m, tail);
    if (f <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(f);
}

double log_familiarity(const Ranking& r, const ItemSet& category, const StopModel& m,
                       TailPolicy tail) {
    const double f = familiarity(r, category, m, tail);
    if (f <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(f);
}

}  // namespace commoneval
