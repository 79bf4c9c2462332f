#ifndef COMMONEVAL_INGEST_HPP
#define COMMONEVAL_INGEST_HPP

#include <iosfwd>
#include <string>

#include "commoneval/model.hpp"

namespace commoneval {

// Malformed input; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Movielens-style rating triples; duplicates resolved last-wins.
struct RawRating {
    UserId user;
    ItemId item;
    int grade = 0;                 // 1..5
    long long timestamp = -1;      // -1 when absent
};
struct RawRatings {
    std::vector<RawRating> ratings;
};

// TREC run format: `user Q0 item rank score tag`, `#` comments. One
// RunSet per distinct tag, sorted by tag. Within a user, items ordered
// by descending score, ties by ascending rank field, then lexicographic
// ItemId.
std::vector<RunSet> parse_run_file(std::istream& in);

// TREC qrels: `user 0 item grade`; repeated (user,item) keeps the last grade.
Qrels parse_qrels(std::istream& in);

// grade' = 1 if grade >= threshold else 0.
Qrels binarize(const Qrels& q, int threshold);

// TSV `item<TAB>category`; a file with zero categories is an error.
CategoryIndex parse_categories(std::istream& in);

// `user::item::rating::timestamp` or comma-separated; auto-detected.
RawRatings parse_ratings(std::istream& in);

// Last-wins per (user,item), then graded qrels.
Qrels ratings_to_qrels(const RawRatings& ratings);

enum class ReportFormat { CSV, JSON };

// Deterministic serialization: rows sorted by (metric, system, category),
// values at 6 significant digits, log values at 4 decimals. Metadata
// lines (CSV: leading `#`, JSON: "config" object) echo the effective
// configuration.
std::string write_report(const MetricReport& report, ReportFormat format,
                         const std::map<std::string, std::string>& metadata = {});

// Inverse of write_report for CSV/JSON report files (metadata returned
// separately); format auto-detected from the first byte.
MetricReport parse_report(std::istream& in, std::map<std::string, std::string>* metadata = nullptr);

// Round-trip writers. Output is deterministic and reparses to an
// identical structure.
std::string write_run_file(const std::vector<RunSet>& runs);
std::string write_qrels(const Qrels& q);
std::string write_categories(const CategoryIndex& idx);

// Shortest decimal representation that round-trips through strtod.
std::string format_double(double v);

// Config echo used in report metadata and synth manifests.
std::map<std::string, std::string> config_metadata(const EvalConfig& cfg);

}  // namespace commoneval

#endif
