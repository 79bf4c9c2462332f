#include "commoneval/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace commoneval {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split_on(const std::string& line, const std::string& sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t p = line.find(sep, start);
        if (p == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, p - start));
        start = p + sep.size();
    }
    return out;
}

bool parse_int(const std::string& s, long long& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    errno = 0;
    out = std::strtoll(s.c_str(), &end, 10);
    return errno == 0 && end == s.c_str() + s.size();
}

bool parse_num(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && !std::isnan(out);
}

bool is_comment_or_blank(const std::string& line) {
    for (char ch : line) {
        if (ch == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(ch))) return false;
    }
    return true;  // blank
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

std::vector<RunSet> parse_run_file(std::istream& in) {
    struct Record {
        double score;
        long long rank;
        ItemId item;
    };
    // tag -> user -> records
    std::map<std::string, std::map<UserId, std::vector<Record>>> by_tag;
    std::map<std::string, std::map<UserId, std::set<ItemId>>> seen;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_comment_or_blank(line)) continue;
        const auto fields = split_ws(line);
        if (fields.size() != 6)
            throw ParseError(lineno, "expected 6 fields `user Q0 item rank score tag`, got " +
                                         std::to_string(fields.size()));
        const std::string& user = fields[0];
        const std::string& item = fields[2];
        long long rank = 0;
        double score = 0.0;
        if (!parse_int(fields[3], rank))
            throw ParseError(lineno, "non-numeric rank field: " + fields[3]);
        if (!parse_num(fields[4], score))
            throw ParseError(lineno, "non-numeric score field: " + fields[4]);
        const std::string& tag = fields[5];
        if (!seen[tag][user].insert(item).second)
            throw ParseError(lineno, "duplicate (tag,user,item): (" + tag + "," + user + "," +
                                         item + ")");
        by_tag[tag][user].push_back({score, rank, item});
    }

    std::vector<RunSet> out;
    for (auto& [tag, users] : by_tag) {
        RunSet run;
        run.system_name = tag;
        for (auto& [user, records] : users) {
            std::sort(records.begin(), records.end(), [](const Record& a, const Record& b) {
                if (a.score != b.score) return a.score > b.score;
                if (a.rank != b.rank) return a.rank < b.rank;
                return a.item < b.item;
            });
            Ranking r;
            r.user = user;
            r.items.reserve(records.size());
            for (const auto& rec : records) r.items.push_back(rec.item);
            run.rankings.emplace(user, std::move(r));
        }
        out.push_back(std::move(run));
    }
    return out;
}

Qrels parse_qrels(std::istream& in) {
    Qrels q;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_comment_or_blank(line)) continue;
        const auto fields = split_ws(line);
        if (fields.size() != 4)
            throw ParseError(lineno, "expected 4 fields `user 0 item grade`, got " +
                                         std::to_string(fields.size()));
        long long grade = 0;
        if (!parse_int(fields[3], grade) || grade < 0)
            throw ParseError(lineno, "bad grade field: " + fields[3]);
        q.judgments[fields[0]][fields[2]] = static_cast<int>(grade);  // last wins
    }
    return q;
}

Qrels binarize(const Qrels& q, int threshold) {
    if (threshold < 1) throw DomainError("threshold must be >= 1");
    Qrels out;
    for (const auto& [user, items] : q.judgments)
        for (const auto& [item, grade] : items)
            out.judgments[user][item] = grade >= threshold ? 1 : 0;
    return out;
}

CategoryIndex parse_categories(std::istream& in) {
    CategoryIndex idx;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_comment_or_blank(line)) continue;
        const auto fields = split_on(line, "\t");
        if (fields.size() != 2)
            throw ParseError(lineno, "expected `item<TAB>category`");
        const std::string item = trim(fields[0]);
        const std::string cat = trim(fields[1]);
        if (item.empty() || cat.empty())
            throw ParseError(lineno, "empty item or category field");
        idx.categories[cat].insert(item);
    }
    if (idx.categories.empty()) throw ParseError(lineno, "no categories");
    return idx;
}

RawRatings parse_ratings(std::istream& in) {
    RawRatings out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_comment_or_blank(line)) continue;
        const bool ml_style = line.find("::") != std::string::npos;
        const auto fields = ml_style ? split_on(line, "::") : split_on(line, ",");
        if (fields.size() != 3 && fields.size() != 4)
            throw ParseError(lineno, "expected `user::item::rating[::timestamp]` or CSV");
        long long grade = 0;
        if (!parse_int(trim(fields[2]), grade) || grade < 1 || grade > 5)
            throw ParseError(lineno, "rating must be an integer in [1,5]: " + fields[2]);
        long long ts = -1;
        if (fields.size() == 4 && !parse_int(trim(fields[3]), ts))
            throw ParseError(lineno, "bad timestamp: " + fields[3]);
        out.ratings.push_back({trim(fields[0]), trim(fields[1]), static_cast<int>(grade), ts});
    }
    return out;
}

Qrels ratings_to_qrels(const RawRatings& ratings) {
    Qrels q;
    for (const auto& r : ratings.ratings) q.judgments[r.user][r.item] = r.grade;
    return q;
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

namespace {

std::string fmt_value(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string fmt_log(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::vector<ReportRow> sorted_rows(const MetricReport& report) {
    std::vector<ReportRow> rows = report.rows;
    std::sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
        if (a.metric_name != b.metric_name) return a.metric_name < b.metric_name;
        if (a.system_name != b.system_name) return a.system_name < b.system_name;
        return a.category.value_or("") < b.category.value_or("");
    });
    return rows;
}

}  // namespace

std::string write_report(const MetricReport& report, ReportFormat format,
                         const std::map<std::string, std::string>& metadata) {
    const auto rows = sorted_rows(report);
    if (format == ReportFormat::CSV) {
        std::string out;
        for (const auto& [k, v] : metadata) out += "# " + k + "=" + v + "\n";
        out += "system,metric,category,value,log_value\n";
        for (const auto& r : rows) {
            out += r.system_name + "," + r.metric_name + "," + r.category.value_or("") + "," +
                   fmt_value(r.value) + "," + (r.log_value ? fmt_log(*r.log_value) : "") + "\n";
        }
        return out;
    }
    nlohmann::ordered_json j;
    j["config"] = metadata;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json row;
        row["system"] = r.system_name;
        row["metric"] = r.metric_name;
        if (r.category)
            row["category"] = *r.category;
        else
            row["category"] = nullptr;
        row["value"] = fmt_value(r.value);
        if (r.log_value)
            row["log_value"] = fmt_log(*r.log_value);
        else
            row["log_value"] = nullptr;
        j["rows"].push_back(row);
    }
    return j.dump(2) + "\n";
}

namespace {

double parse_report_value(const std::string& s, int lineno) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    if (!parse_num(s, v)) throw ParseError(lineno, "bad numeric field: " + s);
    return v;
}

MetricReport parse_report_csv(std::istream& in, std::map<std::string, std::string>* metadata) {
    MetricReport rep;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] == '#') {
            std::string body = trim(line.substr(1));
            const std::size_t eq = body.find('=');
            if (metadata && eq != std::string::npos)
                (*metadata)[body.substr(0, eq)] = body.substr(eq + 1);
            continue;
        }
        if (trim(line).empty()) continue;
        if (!header_seen) {
            if (trim(line) != "system,metric,category,value,log_value")
                throw ParseError(lineno, "bad report header: " + line);
            header_seen = true;
            continue;
        }
        const auto f = split_on(line, ",");
        if (f.size() != 5) throw ParseError(lineno, "expected 5 comma-separated fields");
        ReportRow row;
        row.system_name = f[0];
        row.metric_name = f[1];
        if (!f[2].empty()) row.category = f[2];
        row.value = parse_report_value(f[3], lineno);
        if (!f[4].empty()) row.log_value = parse_report_value(f[4], lineno);
        rep.rows.push_back(std::move(row));
    }
    if (!header_seen) throw ParseError(lineno, "missing report header");
    return rep;
}

MetricReport parse_report_json(std::istream& in, std::map<std::string, std::string>* metadata) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(1, std::string("bad JSON report: ") + e.what());
    }
    MetricReport rep;
    if (metadata && j.contains("config"))
        for (const auto& [k, v] : j["config"].items()) (*metadata)[k] = v.get<std::string>();
    for (const auto& row : j.at("rows")) {
        ReportRow r;
        r.system_name = row.at("system").get<std::string>();
        r.metric_name = row.at("metric").get<std::string>();
        if (!row.at("category").is_null()) r.category = row["category"].get<std::string>();
        r.value = parse_report_value(row.at("value").get<std::string>(), 1);
        if (!row.at("log_value").is_null())
            r.log_value = parse_report_value(row["log_value"].get<std::string>(), 1);
        rep.rows.push_back(std::move(r));
    }
    return rep;
}

}  // namespace

MetricReport parse_report(std::istream& in, std::map<std::string, std::string>* metadata) {
    const int c = in.peek();
    if (c == '{') return parse_report_json(in, metadata);
    return parse_report_csv(in, metadata);
}

std::string write_run_file(const std::vector<RunSet>& runs) {
    std::vector<const RunSet*> ordered;
    for (const auto& r : runs) ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(),
              [](const RunSet* a, const RunSet* b) { return a->system_name < b->system_name; });
    std::string out;
    for (const RunSet* run : ordered) {
        for (const auto& [user, ranking] : run->rankings) {
            const int n = static_cast<int>(ranking.items.size());
            for (int i = 0; i < n; ++i) {
                // score = n - i keeps the parse order equal to the list order
                out += user + " Q0 " + ranking.items[i] + " " + std::to_string(i + 1) + " " +
                       std::to_string(n - i) + " " + run->system_name + "\n";
            }
        }
    }
    return out;
}

std::string write_qrels(const Qrels& q) {
    std::string out;
    for (const auto& [user, items] : q.judgments) {
        std::vector<std::pair<ItemId, int>> sorted(items.begin(), items.end());
        std::sort(sorted.begin(), sorted.end());
        for (const auto& [item, grade] : sorted)
            out += user + " 0 " + item + " " + std::to_string(grade) + "\n";
    }
    return out;
}

std::string write_categories(const CategoryIndex& idx) {
    std::string out;
    for (const auto& [cat, items] : idx.categories)
        for (const auto& item : items) out += item + "\t" + cat + "\n";
    return out;
}

std::map<std::string, std::string> config_metadata(const EvalConfig& cfg) {
    return {
        {"gamma", format_double(cfg.gamma)},
        {"cutoff_k", std::to_string(cfg.cutoff_k)},
        {"alpha", format_double(cfg.alpha)},
        {"tail_policy", to_string(cfg.tail_policy)},
        {"relevance_threshold", std::to_string(cfg.relevance_threshold)},
        {"aggregation", to_string(cfg.aggregation)},
    };
}

}  // namespace commoneval
