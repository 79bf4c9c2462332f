#include "commoneval/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace commoneval {

Direction metric_direction(const std::string& metric_name) {
    if (metric_name == "rsp" || metric_name == "reo") return Direction::LowerBetter;
    return Direction::HigherBetter;
}

Leaderboard rank_systems(const std::vector<SystemScore>& scores, Direction direction) {
    Leaderboard lb;
    lb.direction = direction;
    std::set<std::string> seen;
    for (const auto& s : scores) {
        if (!seen.insert(s.system_name).second)
            throw DomainError("duplicate system: " + s.system_name);
        if (!lb.metric_name.empty() && lb.metric_name != s.metric_name)
            throw DomainError("mixed metrics in one leaderboard");
        lb.metric_name = s.metric_name;
        lb.entries.push_back({s.system_name, s.value, false});
    }
    std::sort(lb.entries.begin(), lb.entries.end(),
              [&](const LeaderboardEntry& a, const LeaderboardEntry& b) {
                  if (a.value != b.value)
                      return direction == Direction::HigherBetter ? a.value > b.value
                                                                  : a.value < b.value;
                  return a.system_name < b.system_name;
              });
    for (std::size_t i = 0; i + 1 < lb.entries.size(); ++i) {
        if (lb.entries[i].value == lb.entries[i + 1].value) {
            lb.entries[i].tied = true;
            lb.entries[i + 1].tied = true;
        }
    }
    return lb;
}

KendallResult kendall_tau(const Leaderboard& a, const Leaderboard& b) {
    std::map<std::string, double> xa, xb;
    for (const auto& e : a.entries) xa[e.system_name] = e.value;
    for (const auto& e : b.entries) xb[e.system_name] = e.value;
    if (xa.size() != xb.size() || xa.size() != a.entries.size() ||
        xb.size() != b.entries.size())
        throw DomainError("leaderboards must cover the same system set");
    for (const auto& [s, v] : xa)
        if (!xb.count(s)) throw DomainError("system missing from second leaderboard: " + s);
    const int n = static_cast<int>(xa.size());
    if (n < 2) throw DomainError("need at least 2 systems");

    std::vector<double> x, y;
    for (const auto& [s, v] : xa) {
        x.push_back(v);
        y.push_back(xb.at(s));
    }

    long long concordant = 0, discordant = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0.0 || dy == 0.0) continue;
            if ((dx > 0) == (dy > 0))
                ++concordant;
            else
                ++discordant;
        }
    }

    auto tie_sizes = [n](const std::vector<double>& v) {
        std::vector<double> s = v;
        std::sort(s.begin(), s.end());
        std::vector<long long> groups;
        long long run = 1;
        for (int i = 1; i < n; ++i) {
            if (s[i] == s[i - 1]) {
                ++run;
            } else {
                if (run > 1) groups.push_back(run);
                run = 1;
            }
        }
        if (run > 1) groups.push_back(run);
        return groups;
    };
    const auto tx = tie_sizes(x);
    const auto ty = tie_sizes(y);

    const double n0 = 0.5 * n * (n - 1);
    double n1 = 0.0, n2 = 0.0;
    for (long long t : tx) n1 += 0.5 * t * (t - 1);
    for (long long t : ty) n2 += 0.5 * t * (t - 1);

    KendallResult res;
    res.approximate = n < 10;
    const double denom = std::sqrt((n0 - n1) * (n0 - n2));
    const double s_stat = static_cast<double>(concordant - discordant);
    if (denom == 0.0) {
        res.tau = 0.0;
        res.p_value = 1.0;
        return res;
    }
    res.tau = s_stat / denom;

    // Tie-adjusted variance of S for the normal approximation.
    double vt = 0.0, vu = 0.0, t2x = 0.0, t2y = 0.0, t3x = 0.0, t3y = 0.0;
    for (long long t : tx) {
        vt += static_cast<double>(t) * (t - 1) * (2 * t + 5);
        t2x += static_cast<double>(t) * (t - 1);
        t3x += static_cast<double>(t) * (t - 1) * (t - 2);
    }
    for (long long t : ty) {
        vu += static_cast<double>(t) * (t - 1) * (2 * t + 5);
        t2y += static_cast<double>(t) * (t - 1);
        t3y += static_cast<double>(t) * (t - 1) * (t - 2);
    }
    const double dn = n;
    double var = (dn * (dn - 1) * (2 * dn + 5) - vt - vu) / 18.0 +
                 t2x * t2y / (2.0 * dn * (dn - 1));
    if (n > 2) var += t3x * t3y / (9.0 * dn * (dn - 1) * (dn - 2));
    if (var <= 0.0) {
        res.p_value = 1.0;
        return res;
    }
    const double z = s_stat / std::sqrt(var);
    res.p_value = std::erfc(std::abs(z) / std::sqrt(2.0));
    return res;
}

namespace {

// Scalar per-system values for one metric; commonality uses log values
// so deep underflow cannot create artificial ties at zero.
double row_value(const ReportRow& r) {
    return r.log_value ? *r.log_value : r.value;
}

}  // namespace

CorrelationMatrix correlation_matrix(const MetricReport& report, bool raw_direction,
                                     bool use_geometric) {
    std::map<std::string, std::map<std::string, double>> by_metric;  // metric -> system -> value
    for (const auto& row : report.rows) {
        if (row.category) continue;
        by_metric[row.metric_name][row.system_name] = row_value(row);
    }
    if (use_geometric) {
        by_metric.erase("commonality");
        auto it = by_metric.find("commonality_geom");
        if (it != by_metric.end()) {
            by_metric["commonality"] = it->second;
            by_metric.erase("commonality_geom");
        }
    } else {
        by_metric.erase("commonality_geom");
    }
    if (by_metric.size() < 2) throw DomainError("need at least 2 metrics");

    CorrelationMatrix cm;
    std::vector<Leaderboard> boards;
    for (const auto& [metric, values] : by_metric) {
        if (values.size() < 2) throw DomainError("need at least 2 systems");
        std::vector<SystemScore> scores;
        const Direction dir =
            raw_direction ? Direction::HigherBetter : metric_direction(metric);
        for (const auto& [sys, v] : values) {
            const double sign = dir == Direction::LowerBetter ? -1.0 : 1.0;
            scores.push_back({sys, metric, sign * v});
        }
        boards.push_back(rank_systems(scores, Direction::HigherBetter));
        cm.metrics.push_back(metric);
    }
    const std::size_t m = boards.size();
    cm.cells.assign(m, std::vector<KendallResult>(m));
    for (std::size_t i = 0; i < m; ++i) {
        cm.cells[i][i] = {1.0, 0.0, false};
        for (std::size_t j = i + 1; j < m; ++j) {
            cm.cells[i][j] = kendall_tau(boards[i], boards[j]);
            cm.cells[j][i] = cm.cells[i][j];
        }
    }
    return cm;
}

std::vector<DisaggRow> disaggregate(const MetricReport& report,
                                    const std::vector<std::string>& systems) {
    std::set<std::string> wanted(systems.begin(), systems.end());
    std::set<std::string> present;
    for (const auto& row : report.rows)
        if (row.metric_name == "commonality") present.insert(row.system_name);
    for (const auto& s : wanted)
        if (!present.count(s)) throw DomainError("unknown system: " + s);

    std::vector<DisaggRow> out;
    for (const auto& row : report.rows) {
        if (row.metric_name != "commonality" || !wanted.count(row.system_name)) continue;
        if (row.category) {
            out.push_back({row.system_name, *row.category,
                           row.log_value ? *row.log_value : row.value, false});
        }
    }
    std::sort(out.begin(), out.end(), [](const DisaggRow& a, const DisaggRow& b) {
        if (a.category != b.category) return a.category < b.category;
        return a.system_name < b.system_name;
    });
    // per-system mean lines (arithmetic-mean commonality rows)
    std::vector<DisaggRow> means;
    for (const auto& row : report.rows) {
        if (row.metric_name == "commonality" && !row.category && wanted.count(row.system_name)) {
            means.push_back({row.system_name, "",
                             row.log_value ? *row.log_value : row.value, true});
        }
    }
    std::sort(means.begin(), means.end(),
              [](const DisaggRow& a, const DisaggRow& b) { return a.system_name < b.system_name; });
    out.insert(out.end(), means.begin(), means.end());
    return out;
}

}  // namespace commoneval
