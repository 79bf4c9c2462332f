#ifndef COMMONEVAL_BASELINES_HPP
#define COMMONEVAL_BASELINES_HPP

#include "commoneval/model.hpp"

namespace commoneval {

struct SystemScore {
    std::string system_name;
    std::string metric_name;
    double value = 0.0;
};

// Per-user metrics. Qrels are expected to be binarized (grades 0/1).

double ndcg(const Ranking& r, const Qrels& q, int k);
double reciprocal_rank(const Ranking& r, const Qrels& q);

// alpha-NDCG: gain at rank i is sum over the item's categories of
// (1-alpha)^(relevant category items already seen). The ideal ranking is
// built greedily over the user's relevant items, ties broken by
// lexicographic ItemId.
double alpha_ndcg(const Ranking& r, const Qrels& q, const CategoryIndex& idx,
                  double alpha, int k);

// ERR-IA with uniform intent weights over the categories of idx and
// binary stop probability R = 1/2 for relevant in-category items.
double err_ia(const Ranking& r, const Qrels& q, const CategoryIndex& idx, int k);

// Mean over users with at least one relevant judged item; such users are
// skipped, not scored 0. n_skipped reports how many were skipped.
struct RunAverage {
    double value = 0.0;
    int n_scored = 0;
    int n_skipped = 0;
};
RunAverage average_ndcg(const RunSet& run, const Qrels& q, int k);
RunAverage average_rr(const RunSet& run, const Qrels& q);
RunAverage average_alpha_ndcg(const RunSet& run, const Qrels& q, const CategoryIndex& idx,
                              double alpha, int k);
RunAverage average_err_ia(const RunSet& run, const Qrels& q, const CategoryIndex& idx, int k);

// Fairness metrics over group exposure in the top k. Both return the
// relative standard deviation std_g(P_g) / mean_g(P_g) (population std).
struct FairnessValue {
    double value = 0.0;
    std::map<CategoryId, double> per_group;     // the P_g values entering the score
    std::vector<CategoryId> excluded_groups;    // REO groups with zero denominator
};

// Ranking-based statistical parity: P_g = sum_u |top-k(u) ∩ g| / (|U|*|g|).
FairnessValue rsp(const RunSet& run, const CategoryIndex& groups, int k);

// Ranking-based equal opportunity:
// P_g = sum_u |top-k(u) ∩ g ∩ rel(u)| / sum_u |g ∩ rel(u)|.
FairnessValue reo(const RunSet& run, const Qrels& q, const CategoryIndex& groups, int k);

}  // namespace commoneval

#endif
