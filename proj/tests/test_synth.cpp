#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "commoneval/browsing.hpp"
#include "commoneval/commonality.hpp"
#include "commoneval/ingest.hpp"
#include "commoneval/synth.hpp"
#include "oracles.hpp"

using namespace commoneval;

namespace {

SynthSpec small_spec() {
    SynthSpec spec;
    spec.seed = 11;
    spec.n_users = 20;
    spec.n_items = 100;
    spec.n_categories = 3;
    spec.category_size = 10;
    spec.relevance_density = 0.05;
    return spec;
}

}  // namespace

TEST_CASE("synth_world is deterministic in the seed") {
    const auto a = synth_world(small_spec());
    const auto b = synth_world(small_spec());
    CHECK(a.catalog == b.catalog);
    CHECK(a.popularity == b.popularity);
    for (const auto& [c, items] : a.categories.categories)
        CHECK(b.categories.categories.at(c) == items);
    CHECK(a.qrels.judgments.size() == b.qrels.judgments.size());
    for (const auto& [u, items] : a.qrels.judgments) {
        REQUIRE(b.qrels.judgments.count(u) == 1);
        CHECK(items == b.qrels.judgments.at(u));
    }

    auto other = small_spec();
    other.seed = 12;
    const auto c = synth_world(other);
    bool any_difference = false;
    for (const auto& [cat, items] : a.categories.categories)
        if (c.categories.categories.at(cat) != items) any_difference = true;
    CHECK(any_difference);
}

TEST_CASE("spec validation") {
    auto spec = small_spec();
    spec.relevance_density = 1.0;
    CHECK_THROWS_AS(spec.validate(), DomainError);
    spec = small_spec();
    spec.n_users = 0;
    CHECK_THROWS_AS(spec.validate(), DomainError);
    spec = small_spec();
    spec.n_categories = 11;
    spec.category_size = 10;
    spec.disjoint_categories = true;  // 110 > 100 items
    CHECK_THROWS_AS(spec.validate(), DomainError);
}

TEST_CASE("disjoint categories have the requested sizes and no overlap") {
    SynthSpec spec;
    spec.seed = 3;
    spec.n_users = 2;
    spec.n_items = 1000;
    spec.n_categories = 2;
    spec.category_size = 50;
    spec.disjoint_categories = true;
    const auto w = synth_world(spec);
    std::set<ItemId> seen;
    for (const auto& [c, items] : w.categories.categories) {
        CHECK(items.size() == 50);
        for (const auto& i : items) CHECK(seen.insert(i).second);
    }
}

TEST_CASE("random_run: permutation property and per-user independence") {
    const auto w = synth_world(small_spec());
    const auto run = random_run(w, 99, w.spec.n_items);
    const std::set<ItemId> catalog(w.catalog.begin(), w.catalog.end());
    bool all_same = true;
    const auto& first = run.rankings.begin()->second.items;
    for (const auto& [u, r] : run.rankings) {
        CHECK(std::set<ItemId>(r.items.begin(), r.items.end()) == catalog);
        if (r.items != first) all_same = false;
    }
    CHECK_FALSE(all_same);  // substreams differ per user

    CHECK_THROWS_AS(random_run(w, 99, w.spec.n_items + 1), DomainError);
}

TEST_CASE("random_run familiarity matches its expectation over seeds") {
    // one user, full-depth random rankings: averaged familiarity over many
    // seeds should match the analytic expectation E[f] = sum_i p(i) * E[recall(i)]
    auto spec = small_spec();
    spec.n_users = 1;
    const auto w = synth_world(spec);
    const CategoryId cat = w.categories.categories.begin()->first;
    const ItemSet& items = w.categories.categories.begin()->second;
    const double gamma = 0.9;
    const int n = spec.n_items;

    double expected = 0.0;  // E[recall(i)] = i / n for uniform permutations
    for (int i = 1; i <= n; ++i)
        expected += (1.0 - gamma) * std::pow(gamma, i - 1) * (static_cast<double>(i) / n);

    const int trials = 1000;
    double sum = 0.0, sumsq = 0.0;
    for (int s = 0; s < trials; ++s) {
        const auto run = random_run(w, 1000 + s, n);
        const double f = familiarity(run.rankings.begin()->second, items, StopModel(gamma),
                                     TailPolicy::PaperLiteral);
        sum += f;
        sumsq += f * f;
    }
    const double mean = sum / trials;
    const double se = std::sqrt(std::max(0.0, sumsq / trials - mean * mean) / trials);
    CHECK(std::abs(mean - expected) <= 3.0 * se);
}

TEST_CASE("popularity_run is shared and sorted by popularity") {
    const auto w = synth_world(small_spec());
    const auto run = popularity_run(w, 50);
    const auto& first = run.rankings.begin()->second.items;
    for (const auto& [u, r] : run.rankings) CHECK(r.items == first);
    for (std::size_t i = 1; i < first.size(); ++i)
        CHECK(w.popularity.at(first[i - 1]) >= w.popularity.at(first[i]));
    CHECK(w.popularity.at(first[0]) ==
          std::max_element(w.popularity.begin(), w.popularity.end(),
                           [](auto& a, auto& b) { return a.second < b.second; })
              ->second);
}

TEST_CASE("utility_oracle_run is NDCG- and RR-ideal for users with relevant items") {
    const auto w = synth_world(small_spec());
    const auto run = utility_oracle_run(w, w.spec.n_items);
    const Qrels binary = binarize(w.qrels, 4);
    for (const auto& [u, r] : run.rankings) {
        int n_rel = 0;
        auto it = binary.judgments.find(u);
        if (it != binary.judgments.end())
            for (const auto& [i, g] : it->second) n_rel += g;
        if (n_rel == 0) continue;
        CHECK(oracles::naive_ndcg(r, binary, 20) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(oracles::naive_rr(r, binary) == doctest::Approx(1.0));
    }
}

TEST_CASE("category_oracle_run dominates on its category") {
    const auto w = synth_world(small_spec());
    const CategoryId cat = w.categories.categories.begin()->first;
    const ItemSet& items = w.categories.categories.begin()->second;
    const auto oracle = category_oracle_run(w, w.spec.n_items, cat);
    const auto& r = oracle.rankings.begin()->second;
    CHECK(recall_at(r, static_cast<int>(items.size()), items) == doctest::Approx(1.0));

    // higher familiarity than a random run for every user
    const auto rnd = random_run(w, 5, w.spec.n_items);
    const StopModel m(0.9);
    for (const auto& [u, rr] : rnd.rankings) {
        CHECK(familiarity(oracle.rankings.at(u), items, m, TailPolicy::PersistBeyondEnd) >=
              familiarity(rr, items, m, TailPolicy::PersistBeyondEnd) - 1e-12);
    }

    CHECK_THROWS_AS(category_oracle_run(w, w.spec.n_items, "nope"), DomainError);
}

TEST_CASE("category oracle with singleton category hits the closed forms") {
    SynthSpec spec = small_spec();
    spec.category_size = 1;
    const auto w = synth_world(spec);
    const CategoryId cat = w.categories.categories.begin()->first;
    const ItemSet& items = w.categories.categories.begin()->second;
    const auto run = category_oracle_run(w, spec.n_items, cat);
    const auto& r = run.rankings.begin()->second;
    const double gamma = 0.9;
    CHECK(familiarity(r, items, StopModel(gamma), TailPolicy::PersistBeyondEnd) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(familiarity(r, items, StopModel(gamma), TailPolicy::PaperLiteral) ==
          doctest::Approx(1.0 - std::pow(gamma, spec.n_items)).epsilon(1e-12));
}

TEST_CASE("noisy interpolation degrades utility monotonically in expectation") {
    const auto w = synth_world(small_spec());
    const Qrels binary = binarize(w.qrels, 4);
    const int depth = w.spec.n_items;
    double prev_ndcg = 2.0;
    for (double noise : {0.0, 0.2, 0.8}) {
        const auto run = noisy_oracle_run(w, 7, depth, noise);
        double sum = 0.0;
        int n = 0;
        for (const auto& [u, r] : run.rankings) {
            const double v = oracles::naive_ndcg(r, binary, 20);
            sum += v;
            ++n;
        }
        const double mean = sum / n;
        CHECK(mean < prev_ndcg + 1e-12);
        prev_ndcg = mean;
    }
}

TEST_CASE("generators are pure: identical run files across invocations") {
    const auto w = synth_world(small_spec());
    const auto fam1 = system_family(w, 50);
    const auto fam2 = system_family(w, 50);
    CHECK(write_run_file(fam1) == write_run_file(fam2));

    for (const auto& name : system_family_names()) {
        const auto member = system_family_member(w, 50, name);
        CHECK(member.system_name == name);
    }
    CHECK_THROWS_AS(system_family_member(w, 50, "nope"), DomainError);
}

TEST_CASE("synth output survives the file round trip without diagnostics") {
    const auto w = synth_world(small_spec());
    const auto fam = system_family(w, 30);
    const std::string run_text = write_run_file(fam);
    std::istringstream in(run_text);
    const auto parsed = parse_run_file(in);
    REQUIRE(parsed.size() == fam.size());
    const ItemSet catalog(w.catalog.begin(), w.catalog.end());
    for (const auto& run : parsed) CHECK(validate_runset(run, catalog).empty());
    CHECK(write_run_file(parsed) == run_text);
}
