#ifndef COMMONEVAL_COMMONALITY_HPP
#define COMMONEVAL_COMMONALITY_HPP

#include "commoneval/browsing.hpp"
#include "commoneval/model.hpp"

namespace commoneval {

// Per-system commonality in natural-log scale. -infinity is the
// absorbing value for a category some user is never exposed to.
struct CommonalityResult {
    std::string system_name;
    std::map<CategoryId, double> per_category_log;
    double arith_mean_log = 0.0;   // log of (1/|C|) * sum_c exp(log_c), via log-sum-exp
    double arith_mean_linear = 0.0;  // best-effort linear rendering, 0 when underflowed
    double geom_mean_log = 0.0;    // (1/|C|) * sum_c log_c
    double geom_mean_linear = 0.0;
};

struct MeanCommonality {
    double arith_log;
    double arith_linear;
    double geom_log;
    double geom_linear;
};

// log of the joint probability that every user of the run is familiar
// with the category: sum over users of log familiarity.
double log_commonality_category(const RunSet& run, const CategoryId& c,
                                const CategoryIndex& idx, const StopModel& m,
                                TailPolicy tail);

// Arithmetic and geometric means over categories, both always computed.
// The arithmetic mean is evaluated through a log-sum-exp shift so it
// survives category values far below linear underflow.
MeanCommonality mean_commonality(const std::map<CategoryId, double>& per_category_log);

CommonalityResult commonality_result(const RunSet& run, const CategoryIndex& idx,
                                     const EvalConfig& cfg);

// Per-(system, category) log rows plus per-system mean rows, in
// deterministic order, ready for write_report.
std::vector<ReportRow> commonality_report(const std::vector<RunSet>& runs,
                                          const CategoryIndex& idx,
                                          const EvalConfig& cfg);

}  // namespace commoneval

#endif
