#ifndef COMMONEVAL_SYNTH_HPP
#define COMMONEVAL_SYNTH_HPP

#include <cstdint>

#include "commoneval/model.hpp"

namespace commoneval {

// SplitMix64. Deliberately not std::mt19937 + distributions: the
// distributions are implementation-defined, and synth output must be
// byte-identical across platforms.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next();
    double unit();                 // uniform in [0,1)
    uint64_t below(uint64_t n);    // uniform in [0,n)
};

uint64_t hash_combine(uint64_t seed, const std::string& s);

struct SynthSpec {
    uint64_t seed = 42;
    int n_users = 100;
    int n_items = 1000;
    int n_categories = 4;
    int category_size = 25;
    double popularity_exponent = 1.0;  // Zipf shape
    double relevance_density = 0.01;   // expected fraction of relevant items per user
    bool disjoint_categories = false;

    void validate() const;
};

struct SynthWorld {
    SynthSpec spec;
    std::vector<ItemId> catalog;              // index == popularity rank, 0 most popular
    CategoryIndex categories;
    Qrels qrels;                              // relevant items carry grade 5
    std::map<ItemId, long long> popularity;   // synthetic play counts
    std::vector<UserId> users;
};

// Deterministic in spec.seed. Item popularity is Zipf over the catalog;
// per-user relevance is popularity-proportional at the requested
// density; categories are sampled without replacement, weighted toward
// unpopular items so they model under-promoted content.
SynthWorld synth_world(const SynthSpec& spec);

// Independent uniform permutation prefix per user, per-user substreams
// derived from (seed, user id).
RunSet random_run(const SynthWorld& world, uint64_t seed, int depth);

// Identical ranking for every user: popularity descending, ties lexicographic.
RunSet popularity_run(const SynthWorld& world, int depth);

// Each user's relevant items first (lexicographic), then the rest
// lexicographic; NDCG-ideal by construction.
RunSet utility_oracle_run(const SynthWorld& world, int depth);

// Category items first (lexicographic), remainder lexicographic, shared
// across users. Upper-bound fixture for commonality on that category.
RunSet category_oracle_run(const SynthWorld& world, int depth, const CategoryId& c);

// Graded interpolation between utility_oracle_run and random_run: a
// seeded fraction `noise` of each user's positions is re-shuffled
// uniformly. noise 0 is the oracle, noise 1 a full shuffle.
RunSet noisy_oracle_run(const SynthWorld& world, uint64_t seed, int depth, double noise);

// The 8-system family used for leaderboard-level checks: random,
// popularity, utility_oracle, and five noisy interpolations.
std::vector<RunSet> system_family(const SynthWorld& world, int depth);
std::vector<std::string> system_family_names();

// Generates one member of system_family by name without materializing
// the other seven.
RunSet system_family_member(const SynthWorld& world, int depth, const std::string& name);

}  // namespace commoneval

#endif
