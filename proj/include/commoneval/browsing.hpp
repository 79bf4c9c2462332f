#ifndef COMMONEVAL_BROWSING_HPP
#define COMMONEVAL_BROWSING_HPP

#include <unordered_map>

#include "commoneval/model.hpp"

namespace commoneval {

// Rank-biased browsing model: the user stops at rank i with probability
// (1 - gamma) * gamma^(i-1).
struct StopModel {
    double gamma;

    explicit StopModel(double g) : gamma(g) {
        if (!(g > 0.0 && g < 1.0)) throw DomainError("gamma must be in (0,1)");
    }
};

double stop_probability(int rank, const StopModel& m);

// |top-k(r) ∩ c| / |c|; k past the end of the ranking means the whole ranking.
double recall_at(const Ranking& r, int k, const ItemSet& category);

// Item -> 1-based rank lookup for one ranking, so familiarity over many
// categories costs O(|c|) per category instead of O(N).
struct RankedPositions {
    std::unordered_map<ItemId, int> rank_of;
    int length = 0;

    explicit RankedPositions(const Ranking& r);
};

// Probability that a user browsing r under m becomes familiar with the
// category: sum over ranks of stop probability times recall. Computed in
// the equivalent step form: sum over category hit positions j of
// (gamma^(j-1) - T) / |c|, where T = gamma^N under PaperLiteral and 0
// under PersistBeyondEnd.
double familiarity(const Ranking& r, const ItemSet& category, const StopModel& m,
                   TailPolicy tail);
double familiarity(const RankedPositions& pos, const ItemSet& category,
                   const StopModel& m, TailPolicy tail);

// Natural log of familiarity; -infinity when familiarity is 0.
double log_familiarity(const Ranking& r, const ItemSet& category, const StopModel& m,
                       TailPolicy tail);
double log_familiarity(const RankedPositions& pos, const ItemSet& category,
                       const StopModel& m, TailPolicy tail);

}  // namespace commoneval

#endif
