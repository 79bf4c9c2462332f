#ifndef COMMONEVAL_ANALYSIS_HPP
#define COMMONEVAL_ANALYSIS_HPP

#include "commoneval/baselines.hpp"
#include "commoneval/model.hpp"

namespace commoneval {

enum class Direction { HigherBetter, LowerBetter };

struct LeaderboardEntry {
    std::string system_name;
    double value = 0.0;
    bool tied = false;  // same value as another system
};

struct Leaderboard {
    std::string metric_name;
    std::vector<LeaderboardEntry> entries;  // best first
    Direction direction = Direction::HigherBetter;
};

// HigherBetter for utility/diversity metrics and commonality,
// LowerBetter for RSP/REO.
Direction metric_direction(const std::string& metric_name);

Leaderboard rank_systems(const std::vector<SystemScore>& scores, Direction direction);

struct KendallResult {
    double tau = 0.0;
    double p_value = 1.0;
    bool approximate = false;  // normal approximation flagged when n < 10
};

// Tie-adjusted tau-b over the two leaderboards' underlying values, with
// a two-sided p-value from the normal approximation.
KendallResult kendall_tau(const Leaderboard& a, const Leaderboard& b);

struct CorrelationMatrix {
    std::vector<std::string> metrics;
    std::vector<std::vector<KendallResult>> cells;  // cells[i][j] for metrics[i] vs [j]
};

// Symmetric tau matrix over the metrics present in the report.
// raw_direction keeps every metric's values as-is (the convention the
// matrix sign conventions follow by default); otherwise LowerBetter
// metrics are negated first. use_geometric selects which commonality
// mean enters the matrix.
CorrelationMatrix correlation_matrix(const MetricReport& report,
                                     bool raw_direction = true,
                                     bool use_geometric = false);

struct DisaggRow {
    std::string system_name;
    CategoryId category;  // empty for per-system mean lines
    double log_value = 0.0;
    bool is_mean = false;
};

// Per-category commonality table for the requested systems, sorted by
// category then system, with per-system mean lines appended.
std::vector<DisaggRow> disaggregate(const MetricReport& report,
                                    const std::vector<std::string>& systems);

}  // namespace commoneval

#endif
