#ifndef COMMONEVAL_MODEL_HPP
#define COMMONEVAL_MODEL_HPP

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace commoneval {

// IDs are opaque strings; movielens uses integers but run files in the
// wild do not, and coercing would be lossy.
using ItemId = std::string;
using UserId = std::string;
using CategoryId = std::string;

using ItemSet = std::set<ItemId>;

// Thrown when an operation's domain precondition is violated
// (empty category, rank < 1, unknown system, ...).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// One user's ordered item list from one system run. Rank is 1-based:
// items[0] sits at rank 1.
struct Ranking {
    UserId user;
    std::vector<ItemId> items;
};

// A named system's rankings for all users; the unit being scored.
struct RunSet {
    std::string system_name;
    std::map<UserId, Ranking> rankings;
};

// Relevance judgments per (user, item). Grades are non-negative; a
// binary view is obtained with binarize() in ingest.
struct Qrels {
    std::map<UserId, std::unordered_map<ItemId, int>> judgments;

    int grade(const UserId& u, const ItemId& i) const {
        auto uit = judgments.find(u);
        if (uit == judgments.end()) return 0;
        auto iit = uit->second.find(i);
        return iit == uit->second.end() ? 0 : iit->second;
    }
};

// Editorially selected categories: label -> item set. Catalog, when
// present, bounds every category.
struct CategoryIndex {
    std::map<CategoryId, ItemSet> categories;
    std::optional<ItemSet> catalog;
};

enum class TailPolicy {
    PaperLiteral,     // stop mass beyond the ranked prefix contributes zero recall
    PersistBeyondEnd  // residual stop mass gamma^N contributes recall at depth N
};

enum class Aggregation { Arithmetic, Geometric };

struct EvalConfig {
    double gamma = 0.9;          // browsing persistence, in (0,1)
    int cutoff_k = 100;          // evaluation depth for cutoff metrics
    double alpha = 0.5;          // alpha-NDCG redundancy penalty, in (0,1)
    TailPolicy tail_policy = TailPolicy::PaperLiteral;
    int relevance_threshold = 4; // grade >= threshold is relevant
    Aggregation aggregation = Aggregation::Arithmetic;

    void validate() const {
        if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must be in (0,1)");
        if (cutoff_k < 1) throw DomainError("cutoff_k must be >= 1");
        if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must be in (0,1)");
        if (relevance_threshold < 1) throw DomainError("relevance_threshold must be >= 1");
    }
};

struct ReportRow {
    std::string system_name;
    std::string metric_name;
    std::optional<CategoryId> category;
    double value = 0.0;
    std::optional<double> log_value;
};

struct TauEntry {
    double tau = 0.0;
    double p_value = 1.0;
};

struct MetricReport {
    std::vector<ReportRow> rows;
    std::map<std::string, std::vector<std::string>> orderings;        // metric -> systems, best first
    std::map<std::pair<std::string, std::string>, TauEntry> correlations;
};

// Validation diagnostic; empty message list means the run is clean.
struct Diagnostic {
    UserId user;
    ItemId item;
    int rank = 0;  // 1-based rank of the offending entry
    std::string message;
};

// Duplicate-item and out-of-catalog checks. Returns diagnostics rather
// than throwing so one bad line does not discard a multi-million-line run.
std::vector<Diagnostic> validate_runset(const RunSet& run,
                                        const std::optional<ItemSet>& catalog = std::nullopt);

const char* to_string(TailPolicy t);
const char* to_string(Aggregation a);

}  // namespace commoneval

#endif
