#include "hmit/rule_miner.hpp"

#include "hmit/error.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace hmit {

void MiningParams::validate() const {
    auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
    if (!in_unit(min_support)) throw ParameterError("min_support must be in (0, 1]");
    if (!in_unit(min_confidence)) throw ParameterError("min_confidence must be in (0, 1]");
    if (min_support_count && *min_support_count == 0) throw ParameterError("min_support_count must be >= 1");
}

bool MiningParams::is_frequent(std::size_t count, std::size_t db_size) const {
    if (min_support_count) return count >= *min_support_count;
    return db_size > 0 && static_cast<double>(count) / static_cast<double>(db_size) >= min_support;
}

bool MiningParams::is_confident(std::size_t rule_count, std::size_t antecedent_count) const {
    return antecedent_count > 0 &&
           static_cast<double>(rule_count) / static_cast<double>(antecedent_count) >= min_confidence;
}

int compare_confidence(const AssociationRule& a, const AssociationRule& b) {
    // a.s / a.n  vs  b.s / b.n
    const auto lhs = static_cast<std::uint64_t>(a.support_count) * b.antecedent_count;
    const auto rhs = static_cast<std::uint64_t>(b.support_count) * a.antecedent_count;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

std::size_t support_count(const Itemset& itemset, std::span<const Itemset> db) {
    return static_cast<std::size_t>(
        std::count_if(db.begin(), db.end(), [&](const Itemset& t) { return itemset.is_subset_of(t); }));
}

namespace {

// Record-id set, one bit per transaction.
class TidSet {
public:
    explicit TidSet(std::size_t n = 0) : words_((n + 63) / 64, 0) {}

    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    TidSet operator&(const TidSet& other) const {
        TidSet out;
        out.words_.resize(words_.size());
        for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] = words_[i] & other.words_[i];
        return out;
    }

private:
    std::vector<std::uint64_t> words_;
};

struct LevelEntry {
    std::vector<std::uint32_t> ids;  // sorted dense item ids
    TidSet tids;
    std::size_t count = 0;
};

struct IdsHash {
    std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (auto x : v) h = (h ^ x) * 1099511628211ull;
        return h;
    }
};

bool shares_prefix(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    return std::equal(a.begin(), a.end() - 1, b.begin());
}

}  // namespace

std::vector<FrequentItemset> mine_frequent(std::span<const Itemset> db, const MiningParams& params) {
    params.validate();
    if (db.empty()) throw DataError("empty dataset");
    const std::size_t n = db.size();

    std::vector<Item> universe;
    for (const auto& t : db) universe.insert(universe.end(), t.begin(), t.end());
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());

    auto id_of = [&](Item item) {
        return static_cast<std::uint32_t>(std::lower_bound(universe.begin(), universe.end(), item) -
                                           universe.begin());
    };

    std::vector<TidSet> item_tids(universe.size(), TidSet(n));
    for (std::size_t r = 0; r < n; ++r)
        for (Item item : db[r]) item_tids[id_of(item)].set(r);

    const std::size_t max_len =
        params.max_antecedent_len ? *params.max_antecedent_len + 1 : std::numeric_limits<std::size_t>::max();

    std::vector<FrequentItemset> out;
    auto emit = [&](const LevelEntry& e) {
        std::vector<Item> items;
        items.reserve(e.ids.size());
        for (auto id : e.ids) items.push_back(universe[id]);
        out.push_back({Itemset(std::move(items)), e.count, static_cast<double>(e.count) / static_cast<double>(n)});
    };

    std::vector<LevelEntry> level;
    for (std::uint32_t id = 0; id < universe.size(); ++id) {
        std::size_t c = item_tids[id].count();
        if (params.is_frequent(c, n)) level.push_back({{id}, item_tids[id], c});
    }

    for (std::size_t k = 1; !level.empty(); ++k) {
        for (const auto& e : level) emit(e);
        if (k >= max_len) break;

        std::unordered_set<std::vector<std::uint32_t>, IdsHash> frequent_k;
        for (const auto& e : level) frequent_k.insert(e.ids);

        std::vector<LevelEntry> next;
        std::vector<std::uint32_t> subset(k);
        for (std::size_t i = 0; i < level.size(); ++i) {
            for (std::size_t j = i + 1; j < level.size() && shares_prefix(level[i].ids, level[j].ids); ++j) {
                const auto a = level[i].ids.back();
                const auto b = level[j].ids.back();
                if (universe[a].attribute == universe[b].attribute) continue;

                std::vector<std::uint32_t> cand = level[i].ids;
                cand.push_back(b);
                bool pruned = false;
                for (std::size_t drop = 0; drop + 2 < cand.size() && !pruned; ++drop) {
                    subset.clear();
                    for (std::size_t x = 0; x < cand.size(); ++x)
                        if (x != drop) subset.push_back(cand[x]);
                    pruned = !frequent_k.contains(subset);
                }
                if (pruned) continue;

                TidSet tids = level[i].tids & item_tids[b];
                std::size_t c = tids.count();
                if (params.is_frequent(c, n)) next.push_back({std::move(cand), std::move(tids), c});
            }
        }
        level = std::move(next);
    }

    std::sort(out.begin(), out.end(), [](const FrequentItemset& a, const FrequentItemset& b) {
        return CanonicalOrder{}(a.itemset, b.itemset);
    });
    return out;
}

std::vector<AssociationRule> generate_rules(std::span<const FrequentItemset> frequents,
                                            const MiningParams& params) {
    params.validate();
    std::unordered_map<Itemset, const FrequentItemset*, ItemsetHash> by_itemset;
    for (const auto& f : frequents) by_itemset.emplace(f.itemset, &f);

    std::vector<AssociationRule> rules;
    for (const auto& s : frequents) {
        if (s.itemset.size() < 2) continue;
        for (Item b : s.itemset) {
            Itemset antecedent = s.itemset.without(b);
            auto it = by_itemset.find(antecedent);
            if (it == by_itemset.end())
                throw ParameterError("frequent itemsets are not downward closed");
            const std::size_t a_count = it->second->support_count;
            if (!params.is_confident(s.support_count, a_count)) continue;
            rules.push_back({std::move(antecedent), b, s.support_count, a_count, s.support,
                             static_cast<double>(s.support_count) / static_cast<double>(a_count)});
        }
    }

    std::sort(rules.begin(), rules.end(), [](const AssociationRule& x, const AssociationRule& y) {
        if (x.consequent.attribute != y.consequent.attribute)
            return x.consequent.attribute < y.consequent.attribute;
        if (int c = compare_confidence(x, y); c != 0) return c > 0;
        if (x.antecedent != y.antecedent) return x.antecedent < y.antecedent;
        return x.consequent.level < y.consequent.level;
    });
    return rules;
}

std::vector<AssociationRule> rules_for_attribute(std::span<const AssociationRule> rules, std::size_t attribute) {
    std::vector<AssociationRule> out;
    for (const auto& r : rules)
        if (r.consequent.attribute == attribute) out.push_back(r);
    return out;
}

RuleIndex::RuleIndex(std::vector<AssociationRule> rules, std::size_t attribute_count)
    : rules_(std::move(rules)), by_attribute_(attribute_count) {
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        const auto a = rules_[i].consequent.attribute;
        if (a >= attribute_count) throw DataError("rule consequent attribute out of range");
        by_attribute_[a].push_back(i);
    }
}

std::span<const std::size_t> RuleIndex::for_attribute(std::size_t attribute) const {
    if (attribute >= by_attribute_.size()) return {};
    return by_attribute_[attribute];
}

}  // namespace hmit
