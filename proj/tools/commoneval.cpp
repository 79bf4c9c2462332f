// commoneval: batch evaluation of recommender runs with the commonality
// metric and standard utility/diversity/fairness baselines.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "commoneval/analysis.hpp"
#include "commoneval/baselines.hpp"
#include "commoneval/commonality.hpp"
#include "commoneval/ingest.hpp"
#include "commoneval/model.hpp"
#include "commoneval/synth.hpp"

namespace fs = std::filesystem;
using namespace commoneval;

namespace {

constexpr int kExitComputation = 1;
constexpr int kExitUsage = 2;

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input file: " + path);
    return in;
}

// write-to-temporary + atomic rename; failures never leave partial output
void atomic_write(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write output file: " + path);
        out << content;
        if (!out) throw InputError("write failed: " + path);
    }
    fs::rename(tmp, target);
}

int thread_cap() {
    const char* env = std::getenv("COMMONEVAL_THREADS");
    if (!env) return 1;
    const int n = std::atoi(env);
    return n < 1 ? 1 : n;
}

// Index-parallel map with results collected in slot order, so the
// output does not depend on the thread count.
template <typename Fn>
void parallel_indices(std::size_t n, Fn fn) {
    const int cap = std::min<std::size_t>(thread_cap(), n == 0 ? 1 : n);
    if (cap <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    std::atomic<std::size_t> cursor{0};
    for (int t = 0; t < cap; ++t) {
        workers.emplace_back([&] {
            while (true) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& w : workers) w.join();
}

struct CommonConfigFlags {
    EvalConfig cfg;
    std::string tail = "literal";
    std::string aggregation = "arith";

    void attach(CLI::App* app) {
        app->add_option("--gamma", cfg.gamma, "browsing persistence in (0,1)")
            ->capture_default_str();
        app->add_option("--cutoff", cfg.cutoff_k, "cutoff depth for NDCG/alpha-NDCG/ERR-IA/RSP/REO")
            ->capture_default_str();
        app->add_option("--alpha", cfg.alpha, "alpha-NDCG redundancy penalty")
            ->capture_default_str();
        app->add_option("--tail", tail, "stop-mass policy beyond the ranked prefix")
            ->check(CLI::IsMember({"literal", "persist"}))
            ->capture_default_str();
        app->add_option("--threshold", cfg.relevance_threshold,
                        "minimum grade counted as relevant")
            ->capture_default_str();
        app->add_option("--aggregation", aggregation, "primary commonality mean")
            ->check(CLI::IsMember({"arith", "geom"}))
            ->capture_default_str();
    }

    EvalConfig resolve() {
        cfg.tail_policy = tail == "persist" ? TailPolicy::PersistBeyondEnd
                                            : TailPolicy::PaperLiteral;
        cfg.aggregation = aggregation == "geom" ? Aggregation::Geometric
                                                : Aggregation::Arithmetic;
        cfg.validate();
        return cfg;
    }
};

struct SystemMetrics {
    std::vector<ReportRow> rows;
    int skipped_users = 0;
    std::vector<CategoryId> reo_excluded;
    std::string error;
};

int cmd_evaluate(const std::vector<std::string>& run_paths, const std::string& qrels_path,
                 const std::string& ratings_path, const std::string& categories_path,
                 const std::string& out_path, const std::string& format,
                 CommonConfigFlags& flags) {
    const EvalConfig cfg = flags.resolve();

    std::vector<RunSet> runs;
    for (const auto& path : run_paths) {
        auto in = open_input(path);
        auto parsed = parse_run_file(in);
        for (auto& r : parsed) runs.push_back(std::move(r));
    }
    if (runs.empty()) throw InputError("no runs found in the given run files");

    Qrels graded;
    if (!qrels_path.empty()) {
        auto in = open_input(qrels_path);
        graded = parse_qrels(in);
    } else {
        auto in = open_input(ratings_path);
        graded = ratings_to_qrels(parse_ratings(in));
    }
    const Qrels binary = binarize(graded, cfg.relevance_threshold);

    auto cat_in = open_input(categories_path);
    const CategoryIndex idx = parse_categories(cat_in);

    for (const auto& run : runs) {
        const auto diags = validate_runset(run);
        if (!diags.empty()) {
            for (const auto& d : diags) std::cerr << run.system_name << ": " << d.message << "\n";
            throw DomainError("run " + run.system_name + " failed validation");
        }
    }

    std::vector<SystemMetrics> per_system(runs.size());
    parallel_indices(runs.size(), [&](std::size_t i) {
        const RunSet& run = runs[i];
        SystemMetrics& m = per_system[i];
        try {
            const auto nd = average_ndcg(run, binary, cfg.cutoff_k);
            m.rows.push_back({run.system_name, "ndcg", std::nullopt, nd.value, std::nullopt});
            m.skipped_users = nd.n_skipped;
            const auto rr = average_rr(run, binary);
            m.rows.push_back({run.system_name, "rr", std::nullopt, rr.value, std::nullopt});
            const auto an = average_alpha_ndcg(run, binary, idx, cfg.alpha, cfg.cutoff_k);
            m.rows.push_back({run.system_name, "alpha_ndcg", std::nullopt, an.value, std::nullopt});
            const auto ei = average_err_ia(run, binary, idx, cfg.cutoff_k);
            m.rows.push_back({run.system_name, "err_ia", std::nullopt, ei.value, std::nullopt});
            const auto sp = rsp(run, idx, cfg.cutoff_k);
            m.rows.push_back({run.system_name, "rsp", std::nullopt, sp.value, std::nullopt});
            const auto eo = reo(run, binary, idx, cfg.cutoff_k);
            m.rows.push_back({run.system_name, "reo", std::nullopt, eo.value, std::nullopt});
            m.reo_excluded = eo.excluded_groups;

            const CommonalityResult com = commonality_result(run, idx, cfg);
            for (const auto& [c, lv] : com.per_category_log)
                m.rows.push_back({run.system_name, "commonality", c, std::exp(lv), lv});
            m.rows.push_back({run.system_name, "commonality", std::nullopt,
                              com.arith_mean_linear, com.arith_mean_log});
            m.rows.push_back({run.system_name, "commonality_geom", std::nullopt,
                              com.geom_mean_linear, com.geom_mean_log});
        } catch (const std::exception& e) {
            m.error = e.what();
        }
    });

    MetricReport report;
    auto metadata = config_metadata(cfg);
    metadata["rsp_denominator"] = "full-group-size";  // no training-set exclusion
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (!per_system[i].error.empty()) throw DomainError(per_system[i].error);
        for (auto& row : per_system[i].rows) report.rows.push_back(std::move(row));
        metadata["skipped_users." + runs[i].system_name] =
            std::to_string(per_system[i].skipped_users);
        if (!per_system[i].reo_excluded.empty()) {
            std::string joined;
            for (const auto& g : per_system[i].reo_excluded)
                joined += (joined.empty() ? "" : ";") + g;
            metadata["reo_excluded." + runs[i].system_name] = joined;
        }
    }

    const ReportFormat fmt = format == "json" ? ReportFormat::JSON : ReportFormat::CSV;
    atomic_write(out_path, write_report(report, fmt, metadata));
    return 0;
}

std::string tau_cell(const KendallResult& k, bool mark) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", k.tau);
    std::string s = buf;
    if (mark && k.p_value < 0.05) s += "**";
    return s;
}

int cmd_correlate(const std::vector<std::string>& report_paths, const std::string& out_path,
                  const std::string& format, bool raw_direction, bool use_geometric) {
    MetricReport merged;
    for (const auto& path : report_paths) {
        auto in = open_input(path);
        const MetricReport r = parse_report(in);
        merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
    }
    const CorrelationMatrix cm = correlation_matrix(merged, raw_direction, use_geometric);

    std::string out;
    if (format == "json") {
        nlohmann::ordered_json j;
        j["metrics"] = cm.metrics;
        j["direction"] = raw_direction ? "raw" : "normalized";
        j["cells"] = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < cm.metrics.size(); ++i) {
            for (std::size_t k = 0; k < cm.metrics.size(); ++k) {
                nlohmann::ordered_json cell;
                cell["a"] = cm.metrics[i];
                cell["b"] = cm.metrics[k];
                cell["tau"] = format_double(cm.cells[i][k].tau);
                cell["p_value"] = format_double(cm.cells[i][k].p_value);
                cell["significant"] = cm.cells[i][k].p_value < 0.05;
                j["cells"].push_back(cell);
            }
        }
        out = j.dump(2) + "\n";
    } else {
        out = "metric";
        for (const auto& m : cm.metrics) out += "," + m;
        out += "\n";
        for (std::size_t i = 0; i < cm.metrics.size(); ++i) {
            out += cm.metrics[i];
            for (std::size_t k = 0; k < cm.metrics.size(); ++k)
                out += "," + tau_cell(cm.cells[i][k], i != k);
            out += "\n";
        }
    }
    atomic_write(out_path, out);
    return 0;
}

int cmd_report(const std::vector<std::string>& report_paths,
               std::vector<std::string> systems, const std::string& scatter_path,
               const std::string& disagg_path) {
    MetricReport merged;
    for (const auto& path : report_paths) {
        auto in = open_input(path);
        const MetricReport r = parse_report(in);
        merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
    }
    if (systems.empty()) {
        std::set<std::string> all;
        for (const auto& row : merged.rows)
            if (row.metric_name == "commonality") all.insert(row.system_name);
        systems.assign(all.begin(), all.end());
    }

    // Fig.-1-style scatter data: utility vs mean commonality
    std::map<std::string, double> ndcg_by_system, comm_by_system;
    for (const auto& row : merged.rows) {
        if (row.category) continue;
        if (row.metric_name == "ndcg") ndcg_by_system[row.system_name] = row.value;
        if (row.metric_name == "commonality" && row.log_value)
            comm_by_system[row.system_name] = *row.log_value;
    }
    std::string scatter = "system,ndcg,commonality_log\n";
    for (const auto& s : systems) {
        if (!ndcg_by_system.count(s) || !comm_by_system.count(s))
            throw DomainError("unknown system: " + s);
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%.6g", ndcg_by_system[s]);
        scatter += s;
        scatter += ",";
        scatter += buf;
        std::snprintf(buf, sizeof(buf), "%.4f", comm_by_system[s]);
        scatter += ",";
        scatter += buf;
        scatter += "\n";
    }
    atomic_write(scatter_path, scatter);

    // Fig.-2-style per-category disaggregation
    const auto rows = disaggregate(merged, systems);
    std::string disagg = "system,category,log_value\n";
    for (const auto& r : rows) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", r.log_value);
        disagg += r.system_name + "," + (r.is_mean ? "(mean)" : r.category) + "," + buf + "\n";
    }
    atomic_write(disagg_path, disagg);
    return 0;
}

int cmd_synth(SynthSpec spec, const std::string& out_dir, int depth) {
    spec.validate();
    if (depth == 0) depth = spec.n_items;
    const SynthWorld world = synth_world(spec);
    const auto runs = system_family(world, depth);

    atomic_write(out_dir + "/runs.txt", write_run_file(runs));
    atomic_write(out_dir + "/qrels.txt", write_qrels(world.qrels));
    atomic_write(out_dir + "/categories.tsv", write_categories(world.categories));

    nlohmann::ordered_json manifest;
    manifest["seed"] = spec.seed;
    manifest["n_users"] = spec.n_users;
    manifest["n_items"] = spec.n_items;
    manifest["n_categories"] = spec.n_categories;
    manifest["category_size"] = spec.category_size;
    manifest["popularity_exponent"] = format_double(spec.popularity_exponent);
    manifest["relevance_density"] = format_double(spec.relevance_density);
    manifest["disjoint_categories"] = spec.disjoint_categories;
    manifest["depth"] = depth;
    manifest["systems"] = system_family_names();
    atomic_write(out_dir + "/manifest.json", manifest.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"commoneval: recommender-run evaluation with commonality"};
    app.require_subcommand(1);

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "score runs against qrels and categories");
    std::vector<std::string> run_paths;
    std::string qrels_path, ratings_path, categories_path, out_path, format = "csv";
    CommonConfigFlags flags;
    ev->add_option("--runs", run_paths, "TREC run files")->required();
    ev->add_option("--qrels", qrels_path, "TREC qrels file");
    ev->add_option("--ratings", ratings_path, "movielens-style ratings file");
    ev->add_option("--categories", categories_path, "item<TAB>category TSV")->required();
    ev->add_option("--out", out_path, "report output path")->required();
    ev->add_option("--format", format, "report format")
        ->check(CLI::IsMember({"csv", "json"}));
    flags.attach(ev);

    // correlate
    auto* co = app.add_subcommand("correlate", "Kendall tau matrix between metric leaderboards");
    std::vector<std::string> co_reports;
    std::string co_out, co_format = "csv";
    bool raw_direction = true;
    bool normalize_direction = false;
    bool use_geometric = false;
    co->add_option("--report", co_reports, "report files from evaluate")->required();
    co->add_option("--out", co_out, "matrix output path")->required();
    co->add_option("--format", co_format, "output format")->check(CLI::IsMember({"csv", "json"}));
    co->add_flag("--raw-direction", raw_direction,
                 "correlate raw metric values (default; matches published sign conventions)");
    co->add_flag("--normalize-direction", normalize_direction,
                 "negate lower-is-better metrics (RSP/REO) before correlating");
    co->add_flag("--geometric", use_geometric, "use the geometric commonality mean");

    // report
    auto* rp = app.add_subcommand("report", "scatter + per-category disaggregation data");
    std::vector<std::string> rp_reports, rp_systems;
    std::string scatter_out, disagg_out;
    rp->add_option("--report", rp_reports, "report files from evaluate")->required();
    rp->add_option("--systems", rp_systems, "systems to include (default: all)");
    rp->add_option("--scatter-out", scatter_out, "system,ndcg,commonality_log CSV")->required();
    rp->add_option("--disagg-out", disagg_out, "system,category,log_value CSV")->required();

    // synth
    auto* sy = app.add_subcommand("synth", "generate a deterministic synthetic world");
    SynthSpec spec;
    std::string synth_dir;
    int depth = 0;
    sy->add_option("--seed", spec.seed, "generator seed")->capture_default_str();
    sy->add_option("--users", spec.n_users, "number of users")->capture_default_str();
    sy->add_option("--items", spec.n_items, "catalog size")->capture_default_str();
    sy->add_option("--categories", spec.n_categories, "number of categories")
        ->capture_default_str();
    sy->add_option("--category-size", spec.category_size, "items per category")
        ->capture_default_str();
    sy->add_option("--popularity-exponent", spec.popularity_exponent, "Zipf shape")
        ->capture_default_str();
    sy->add_option("--density", spec.relevance_density, "expected relevant fraction per user")
        ->capture_default_str();
    sy->add_flag("--disjoint", spec.disjoint_categories, "make categories disjoint");
    sy->add_option("--depth", depth, "ranking depth (default: full catalog)");
    sy->add_option("--out-dir", synth_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (ev->parsed()) {
            if (qrels_path.empty() == ratings_path.empty())
                throw InputError("exactly one of --qrels or --ratings is required");
            return cmd_evaluate(run_paths, qrels_path, ratings_path, categories_path, out_path,
                                format, flags);
        }
        if (co->parsed())
            return cmd_correlate(co_reports, co_out, co_format,
                                 raw_direction && !normalize_direction, use_geometric);
        if (rp->parsed()) return cmd_report(rp_reports, rp_systems, scatter_out, disagg_out);
        if (sy->parsed()) return cmd_synth(spec, synth_dir, depth);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitComputation;
    }
    return 0;
}
