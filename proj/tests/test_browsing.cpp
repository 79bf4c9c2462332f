#include <doctest.h>

#include <cmath>
#include <random>

#include "commoneval/browsing.hpp"
#include "oracles.hpp"

using namespace commoneval;

TEST_CASE("stop_probability direct values") {
    CHECK(stop_probability(1, StopModel(0.9)) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(stop_probability(2, StopModel(0.9)) == doctest::Approx(0.09).epsilon(1e-12));
    CHECK(stop_probability(3, StopModel(0.5)) == doctest::Approx(0.125).epsilon(1e-12));
    CHECK_THROWS_AS(stop_probability(0, StopModel(0.9)), DomainError);
}

TEST_CASE("stop probabilities sum to 1 - gamma^N") {
    for (double gamma : {0.5, 0.9, 0.99}) {
        StopModel m(gamma);
        double sum = 0.0;
        const int n = 200;
        for (int i = 1; i <= n; ++i) sum += stop_probability(i, m);
        CHECK(sum == doctest::Approx(1.0 - std::pow(gamma, n)).epsilon(1e-12));
    }
}

TEST_CASE("recall_at") {
    Ranking r{"u", {"a", "b", "c"}};
    CHECK(recall_at(r, 1, {"a", "c"}) == doctest::Approx(0.5));
    CHECK(recall_at(r, 3, {"z"}) == doctest::Approx(0.0));
    CHECK(recall_at(Ranking{"u", {"a", "b"}}, 5, {"a", "b"}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(recall_at(r, 1, {}), DomainError);

    // non-decreasing in k
    const ItemSet c{"a", "c"};
    double prev = 0.0;
    for (int k = 1; k <= 3; ++k) {
        const double v = recall_at(r, k, c);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("familiarity geometric-series fixture") {
    Ranking r{"u", {"c1", "x2", "x3", "x4", "x5"}};
    const double f = familiarity(r, {"c1"}, StopModel(0.9), TailPolicy::PaperLiteral);
    CHECK(f == doctest::Approx(1.0 - std::pow(0.9, 5)).epsilon(1e-12));
    CHECK(f == doctest::Approx(0.40951).epsilon(1e-6));
}

TEST_CASE("familiarity zero when category is absent") {
    Ranking r{"u", {"a", "b"}};
    CHECK(familiarity(r, {"z"}, StopModel(0.9), TailPolicy::PaperLiteral) == 0.0);
    CHECK(familiarity(r, {"z"}, StopModel(0.9), TailPolicy::PersistBeyondEnd) == 0.0);
}

TEST_CASE("familiarity two-hit fixture, both tail policies") {
    // |c|=2 at ranks 2 and 4 of a length-5 ranking, gamma 0.9
    Ranking r{"u", {"x1", "c1", "x3", "c2", "x5"}};
    const ItemSet c{"c1", "c2"};
    const double lit = familiarity(r, c, StopModel(0.9), TailPolicy::PaperLiteral);
    const double per = familiarity(r, c, StopModel(0.9), TailPolicy::PersistBeyondEnd);
    CHECK(lit == doctest::Approx(0.22401).epsilon(1e-5));
    CHECK(per == doctest::Approx(0.81450).epsilon(1e-5));

    // Monte Carlo oracle agreement within 3 standard errors
    for (TailPolicy tail : {TailPolicy::PaperLiteral, TailPolicy::PersistBeyondEnd}) {
        const auto mc = oracles::monte_carlo_familiarity(r, c, 0.9, tail, 1000000, 7);
        const double f = familiarity(r, c, StopModel(0.9), tail);
        CHECK(std::abs(f - mc.mean) <= 3.0 * mc.stderr_);
    }
}

TEST_CASE("log_familiarity") {
    Ranking one{"u", {"c1"}};
    CHECK(log_familiarity(one, {"c1"}, StopModel(0.9), TailPolicy::PersistBeyondEnd) ==
          doctest::Approx(0.0).epsilon(1e-12));
    Ranking r{"u", {"a", "b"}};
    CHECK(std::isinf(log_familiarity(r, {"z"}, StopModel(0.9), TailPolicy::PaperLiteral)));
    Ranking two{"u", {"x1", "c1", "x3", "c2", "x5"}};
    CHECK(log_familiarity(two, {"c1", "c2"}, StopModel(0.9), TailPolicy::PaperLiteral) ==
          doctest::Approx(-1.4960).epsilon(1e-4));
}

namespace {

Ranking random_ranking(std::mt19937_64& rng, int n) {
    Ranking r{"u", {}};
    for (int i = 0; i < n; ++i) r.items.push_back("i" + std::to_string(i));
    for (int i = n - 1; i > 0; --i) std::swap(r.items[i], r.items[rng() % (i + 1)]);
    return r;
}

ItemSet random_category(std::mt19937_64& rng, int n, int size) {
    ItemSet c;
    while (static_cast<int>(c.size()) < size) c.insert("i" + std::to_string(rng() % n));
    return c;
}

}  // namespace

TEST_CASE("step form equals the direct summation on random instances") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 50; ++t) {
        const int n = 1 + static_cast<int>(rng() % 1000);
        const auto r = random_ranking(rng, n);
        const auto c = random_category(rng, n + 20, 1 + static_cast<int>(rng() % 8));
        const double gamma = 0.5 + 0.49 * (rng() % 1000) / 1000.0;
        for (TailPolicy tail : {TailPolicy::PaperLiteral, TailPolicy::PersistBeyondEnd}) {
            const double fast = familiarity(r, c, StopModel(gamma), tail);
            const double slow = oracles::direct_familiarity(r, c, gamma, tail);
            CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
            CHECK(fast >= 0.0);
            CHECK(fast <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("swap monotonicity: promoting a category item increases familiarity") {
    std::mt19937_64 rng(29);
    for (int t = 0; t < 50; ++t) {
        const int n = 5 + static_cast<int>(rng() % 30);
        auto r = random_ranking(rng, n);
        const auto c = random_category(rng, n, 2);
        // find a category item with a non-category item ahead of it
        int hit = -1, ahead = -1;
        for (int i = 0; i < n; ++i) {
            if (c.count(r.items[i])) {
                for (int j = i - 1; j >= 0; --j) {
                    if (!c.count(r.items[j])) {
                        hit = i;
                        ahead = j;
                        break;
                    }
                }
                if (hit >= 0) break;
            }
        }
        if (hit < 0) continue;
        for (TailPolicy tail : {TailPolicy::PaperLiteral, TailPolicy::PersistBeyondEnd}) {
            const double before = familiarity(r, c, StopModel(0.9), tail);
            auto better = r;
            std::swap(better.items[hit], better.items[ahead]);
            const double after = familiarity(better, c, StopModel(0.9), tail);
            CHECK(after > before);
        }
    }
}

TEST_CASE("tail dominance: persist >= literal, equal iff recall at N is zero") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 50; ++t) {
        const int n = 1 + static_cast<int>(rng() % 50);
        const auto r = random_ranking(rng, n);
        const auto c = random_category(rng, n + 10, 1 + static_cast<int>(rng() % 5));
        const double lit = familiarity(r, c, StopModel(0.9), TailPolicy::PaperLiteral);
        const double per = familiarity(r, c, StopModel(0.9), TailPolicy::PersistBeyondEnd);
        CHECK(per >= lit - 1e-15);
        if (recall_at(r, n, c) == 0.0)
            CHECK(per == doctest::Approx(lit).epsilon(1e-12));
        else
            CHECK(per > lit);
    }
}

TEST_CASE("persist-tail familiarity is prefix-invariant below the deepest hit") {
    Ranking full{"u", {"x1", "c1", "x3", "c2", "x5", "x6", "x7"}};
    Ranking cut{"u", {"x1", "c1", "x3", "c2"}};
    const ItemSet c{"c1", "c2"};
    CHECK(familiarity(full, c, StopModel(0.9), TailPolicy::PersistBeyondEnd) ==
          doctest::Approx(familiarity(cut, c, StopModel(0.9), TailPolicy::PersistBeyondEnd))
              .epsilon(1e-12));
}
