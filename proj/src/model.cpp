#include "commoneval/model.hpp"

#include <unordered_set>

namespace commoneval {

std::vector<Diagnostic> validate_runset(const RunSet& run,
                                        const std::optional<ItemSet>& catalog) {
    std::vector<Diagnostic> out;
    for (const auto& [user, ranking] : run.rankings) {
        if (ranking.items.empty()) {
            out.push_back({user, "", 0, "empty ranking for user " + user});
            continue;
        }
        std::unordered_set<ItemId> seen;
        seen.reserve(ranking.items.size());
        int rank = 0;
        for (const auto& item : ranking.items) {
            ++rank;
            if (!seen.insert(item).second) {
                out.push_back({user, item, rank,
                               "duplicate item " + item + " for user " + user +
                                   " at rank " + std::to_string(rank)});
            }
            if (catalog && !catalog->count(item)) {
                out.push_back({user, item, rank,
                               "unknown item " + item + " for user " + user +
                                   " at rank " + std::to_string(rank)});
            }
        }
    }
    return out;
}

const char* to_string(TailPolicy t) {
    return t == TailPolicy::PaperLiteral ? "literal" : "persist";
}

const char* to_string(Aggregation a) {
    return a == Aggregation::Arithmetic ? "arith" : "geom";
}

}  // namespace commoneval
