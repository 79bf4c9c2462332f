#include "commoneval/commonality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace commoneval {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_commonality_category(const RunSet& run, const CategoryId& c,
                                const CategoryIndex& idx, const StopModel& m,
                                TailPolicy tail) {
    auto cit = idx.categories.find(c);
    if (cit == idx.categories.end()) throw DomainError("unknown category: " + c);
    const ItemSet& items = cit->second;

    double sum = 0.0;
    for (const auto& [user, ranking] : run.rankings) {
        if (ranking.items.empty())
            throw DomainError("empty ranking for user " + user + " in run " + run.system_name);
        const double lf = log_familiarity(ranking, items, m, tail);
        if (std::isinf(lf)) return kNegInf;  // zero familiarity absorbs the product
        sum += lf;
    }
    return sum;
}

MeanCommonality mean_commonality(const std::map<CategoryId, double>& per_category_log) {
    if (per_category_log.empty()) throw DomainError("no categories");
    const double n = static_cast<double>(per_category_log.size());

    // Arithmetic mean via log-sum-exp shift; the shift keeps the mean
    // finite even when every category value underflows linearly.
    double max_log = kNegInf;
    for (const auto& [c, lv] : per_category_log) max_log = std::max(max_log, lv);

    double arith_log;
    if (std::isinf(max_log)) {
        arith_log = kNegInf;  // all categories absorbed
    } else {
        double s = 0.0;
        for (const auto& [c, lv] : per_category_log) s += std::exp(lv - max_log);
        arith_log = max_log + std::log(s) - std::log(n);
    }

    double geom_log = 0.0;
    for (const auto& [c, lv] : per_category_log) geom_log += lv;
    geom_log /= n;

    return {arith_log, std::exp(arith_log), geom_log, std::exp(geom_log)};
}

CommonalityResult commonality_result(const RunSet& run, const CategoryIndex& idx,
                                     const EvalConfig& cfg) {
    cfg.validate();
    if (idx.categories.empty()) throw DomainError("no categories");
    StopModel m(cfg.gamma);

    CommonalityResult res;
    res.system_name = run.system_name;

    // One position index per ranking, shared by all categories.
    std::vector<std::pair<const UserId*, RankedPositions>> indexed;
    indexed.reserve(run.rankings.size());
    for (const auto& [user, ranking] : run.rankings) {
        if (ranking.items.empty())
            throw DomainError("empty ranking for user " + user + " in run " + run.system_name);
        indexed.emplace_back(&user, RankedPositions(ranking));
    }

    for (const auto& [c, items] : idx.categories) {
        double sum = 0.0;
        for (const auto& [user, pos] : indexed) {
            const double lf = log_familiarity(pos, items, m, cfg.tail_policy);
            if (std::isinf(lf)) {
                sum = kNegInf;
                break;
            }
            sum += lf;
        }
        res.per_category_log.emplace(c, sum);
    }

    const MeanCommonality mc = mean_commonality(res.per_category_log);
    res.arith_mean_log = mc.arith_log;
    res.arith_mean_linear = mc.arith_linear;
    res.geom_mean_log = mc.geom_log;
    res.geom_mean_linear = mc.geom_linear;
    return res;
}

std::vector<ReportRow> commonality_report(const std::vector<RunSet>& runs,
                                          const CategoryIndex& idx,
                                          const EvalConfig& cfg) {
    std::vector<ReportRow> rows;
    for (const auto& run : runs) {
        const CommonalityResult res = commonality_result(run, idx, cfg);
        for (const auto& [c, lv] : res.per_category_log)
            rows.push_back({run.system_name, "commonality", c, std::exp(lv), lv});
        rows.push_back({run.system_name, "commonality", std::nullopt,
                        res.arith_mean_linear, res.arith_mean_log});
        rows.push_back({run.system_name, "commonality_geom", std::nullopt,
                        res.geom_mean_linear, res.geom_mean_log});
    }
    return rows;
}

}  // namespace commoneval
