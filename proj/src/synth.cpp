#include "commoneval/synth.hpp"

#include <algorithm>
#include <cmath>

namespace commoneval {

uint64_t SplitMix64::next() {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

uint64_t SplitMix64::below(uint64_t n) {
    return n == 0 ? 0 : next() % n;
}

uint64_t hash_combine(uint64_t seed, const std::string& s) {
    uint64_t h = 0xCBF29CE484222325ULL ^ seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;  // FNV-1a
    }
    SplitMix64 scramble(h);
    return scramble.next();
}

void SynthSpec::validate() const {
    if (n_users < 1 || n_items < 1 || n_categories < 1 || category_size < 1)
        throw DomainError("all counts must be >= 1");
    if (category_size > n_items) throw DomainError("category_size exceeds n_items");
    if (disjoint_categories &&
        static_cast<long long>(n_categories) * category_size > n_items)
        throw DomainError("disjoint categories do not fit in the catalog");
    if (popularity_exponent < 0.0) throw DomainError("popularity_exponent must be >= 0");
    if (!(relevance_density > 0.0 && relevance_density < 1.0))
        throw DomainError("relevance_density must be in (0,1)");
}

namespace {

std::string padded(const char* prefix, int value, int width) {
    std::string digits = std::to_string(value);
    while (static_cast<int>(digits.size()) < width) digits.insert(digits.begin(), '0');
    return prefix + digits;
}

int id_width(int count) {
    return std::max(4, static_cast<int>(std::to_string(count - 1).size()));
}

// Weighted sampling without replacement via cumulative scan.
std::vector<int> weighted_sample(std::vector<int>& pool, std::vector<double>& weights,
                                 int count, SplitMix64& rng, bool remove_from_pool) {
    std::vector<int> chosen;
    std::vector<char> taken(pool.size(), 0);
    for (int c = 0; c < count; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (!taken[i]) total += weights[i];
        double target = rng.unit() * total;
        std::size_t pick = pool.size();
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (taken[i]) continue;
            target -= weights[i];
            if (target <= 0.0) {
                pick = i;
                break;
            }
        }
        if (pick == pool.size()) {  // numeric edge: take the last available
            for (std::size_t i = pool.size(); i-- > 0;)
                if (!taken[i]) {
                    pick = i;
                    break;
                }
        }
        taken[pick] = 1;
        chosen.push_back(pool[pick]);
    }
    if (remove_from_pool) {
        std::vector<int> new_pool;
        std::vector<double> new_weights;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (!taken[i]) {
                new_pool.push_back(pool[i]);
                new_weights.push_back(weights[i]);
            }
        }
        pool = std::move(new_pool);
        weights = std::move(new_weights);
    }
    return chosen;
}

}  // namespace

SynthWorld synth_world(const SynthSpec& spec) {
    spec.validate();
    SynthWorld w;
    w.spec = spec;

    const int iw = id_width(spec.n_items);
    const int uw = id_width(spec.n_users);
    w.catalog.reserve(spec.n_items);
    for (int i = 0; i < spec.n_items; ++i) w.catalog.push_back(padded("i", i, iw));
    for (int u = 0; u < spec.n_users; ++u) w.users.push_back(padded("u", u, uw));

    // Catalog index doubles as popularity rank: Zipf over the index.
    std::vector<double> zipf(spec.n_items);
    double zipf_sum = 0.0;
    for (int i = 0; i < spec.n_items; ++i) {
        zipf[i] = std::pow(static_cast<double>(i + 1), -spec.popularity_exponent);
        zipf_sum += zipf[i];
    }
    for (int i = 0; i < spec.n_items; ++i)
        w.popularity[w.catalog[i]] = std::llround(1e6 * zipf[i]);

    // Categories model under-promoted content: sampling weight is the
    // inverse of the popularity weight, so unpopular items dominate.
    {
        SplitMix64 rng(hash_combine(spec.seed, "categories"));
        std::vector<int> pool(spec.n_items);
        std::vector<double> weights(spec.n_items);
        for (int i = 0; i < spec.n_items; ++i) {
            pool[i] = i;
            weights[i] = std::pow(static_cast<double>(i + 1), spec.popularity_exponent);
        }
        for (int c = 0; c < spec.n_categories; ++c) {
            auto members = weighted_sample(pool, weights, spec.category_size, rng,
                                           spec.disjoint_categories);
            ItemSet items;
            for (int idx : members) items.insert(w.catalog[idx]);
            w.categories.categories.emplace(padded("cat", c, 2), std::move(items));
        }
    }
    w.categories.catalog = ItemSet(w.catalog.begin(), w.catalog.end());

    // Popularity-proportional relevance at the requested expected density.
    for (const auto& user : w.users) {
        SplitMix64 rng(hash_combine(spec.seed ^ 0x52454C45564E4345ULL, user));
        for (int i = 0; i < spec.n_items; ++i) {
            const double p = std::min(
                1.0, spec.relevance_density * spec.n_items * zipf[i] / zipf_sum);
            if (rng.unit() < p) w.qrels.judgments[user][w.catalog[i]] = 5;
        }
    }
    return w;
}

namespace {

void check_depth(const SynthWorld& world, int depth) {
    if (depth < 1 || depth > world.spec.n_items)
        throw DomainError("depth must be in [1, n_items]");
}

RunSet shared_ranking_run(const SynthWorld& world, const std::string& name,
                          std::vector<ItemId> items, int depth) {
    items.resize(static_cast<std::size_t>(depth));
    RunSet run;
    run.system_name = name;
    for (const auto& user : world.users) run.rankings.emplace(user, Ranking{user, items});
    return run;
}

std::vector<ItemId> oracle_items(const SynthWorld& world, const UserId& user) {
    std::vector<ItemId> rel, nonrel;
    auto it = world.qrels.judgments.find(user);
    for (const auto& item : world.catalog) {
        const bool r = it != world.qrels.judgments.end() && it->second.count(item);
        (r ? rel : nonrel).push_back(item);
    }
    // catalog is lexicographically sorted, so both halves already are
    rel.insert(rel.end(), nonrel.begin(), nonrel.end());
    return rel;
}

}  // namespace

RunSet random_run(const SynthWorld& world, uint64_t seed, int depth) {
    check_depth(world, depth);
    RunSet run;
    run.system_name = "random";
    for (const auto& user : world.users) {
        SplitMix64 rng(hash_combine(seed, user));
        std::vector<int> idx(world.spec.n_items);
        for (int i = 0; i < world.spec.n_items; ++i) idx[i] = i;
        // partial Fisher-Yates: only the prefix is needed
        for (int i = 0; i < depth; ++i) {
            const int j = i + static_cast<int>(rng.below(world.spec.n_items - i));
            std::swap(idx[i], idx[j]);
        }
        Ranking r;
        r.user = user;
        r.items.reserve(depth);
        for (int i = 0; i < depth; ++i) r.items.push_back(world.catalog[idx[i]]);
        run.rankings.emplace(user, std::move(r));
    }
    return run;
}

RunSet popularity_run(const SynthWorld& world, int depth) {
    check_depth(world, depth);
    std::vector<ItemId> items = world.catalog;
    std::sort(items.begin(), items.end(), [&](const ItemId& a, const ItemId& b) {
        const long long pa = world.popularity.at(a), pb = world.popularity.at(b);
        if (pa != pb) return pa > pb;
        return a < b;
    });
    return shared_ranking_run(world, "popularity", std::move(items), depth);
}

RunSet utility_oracle_run(const SynthWorld& world, int depth) {
    check_depth(world, depth);
    RunSet run;
    run.system_name = "utility_oracle";
    for (const auto& user : world.users) {
        auto items = oracle_items(world, user);
        items.resize(static_cast<std::size_t>(depth));
        run.rankings.emplace(user, Ranking{user, std::move(items)});
    }
    return run;
}

RunSet category_oracle_run(const SynthWorld& world, int depth, const CategoryId& c) {
    check_depth(world, depth);
    auto cit = world.categories.categories.find(c);
    if (cit == world.categories.categories.end()) throw DomainError("unknown category: " + c);
    std::vector<ItemId> front, rest;
    for (const auto& item : world.catalog)
        (cit->second.count(item) ? front : rest).push_back(item);
    front.insert(front.end(), rest.begin(), rest.end());
    return shared_ranking_run(world, "category_oracle_" + c, std::move(front), depth);
}

RunSet noisy_oracle_run(const SynthWorld& world, uint64_t seed, int depth, double noise) {
    check_depth(world, depth);
    if (!(noise >= 0.0 && noise <= 1.0)) throw DomainError("noise must be in [0,1]");
    RunSet run;
    run.system_name = "noisy";
    const int n_shuffled = static_cast<int>(std::lround(noise * depth));
    for (const auto& user : world.users) {
        auto items = oracle_items(world, user);
        items.resize(static_cast<std::size_t>(depth));
        SplitMix64 rng(hash_combine(seed, user));
        // pick the positions to disturb, then shuffle the items on them
        std::vector<int> pos(depth);
        for (int i = 0; i < depth; ++i) pos[i] = i;
        for (int i = 0; i < n_shuffled; ++i) {
            const int j = i + static_cast<int>(rng.below(depth - i));
            std::swap(pos[i], pos[j]);
        }
        pos.resize(n_shuffled);
        std::sort(pos.begin(), pos.end());
        std::vector<ItemId> moved;
        moved.reserve(n_shuffled);
        for (int p : pos) moved.push_back(items[p]);
        for (int i = n_shuffled - 1; i > 0; --i)
            std::swap(moved[i], moved[rng.below(static_cast<uint64_t>(i) + 1)]);
        for (int i = 0; i < n_shuffled; ++i) items[pos[i]] = std::move(moved[i]);
        run.rankings.emplace(user, Ranking{user, std::move(items)});
    }
    return run;
}

std::vector<std::string> system_family_names() {
    return {"random",    "popularity", "utility_oracle", "noisy_005",
            "noisy_010", "noisy_020",  "noisy_040",      "noisy_080"};
}

RunSet system_family_member(const SynthWorld& world, int depth, const std::string& name) {
    const uint64_t seed = world.spec.seed;
    if (name == "random") return random_run(world, hash_combine(seed, "random"), depth);
    if (name == "popularity") return popularity_run(world, depth);
    if (name == "utility_oracle") return utility_oracle_run(world, depth);
    const std::map<std::string, double> noise = {{"noisy_005", 0.05},
                                                 {"noisy_010", 0.10},
                                                 {"noisy_020", 0.20},
                                                 {"noisy_040", 0.40},
                                                 {"noisy_080", 0.80}};
    auto it = noise.find(name);
    if (it == noise.end()) throw DomainError("unknown system family member: " + name);
    RunSet run = noisy_oracle_run(world, hash_combine(seed, name), depth, it->second);
    run.system_name = name;
    return run;
}

std::vector<RunSet> system_family(const SynthWorld& world, int depth) {
    std::vector<RunSet> out;
    for (const auto& name : system_family_names())
        out.push_back(system_family_member(world, depth, name));
    return out;
}

}  // namespace commoneval
