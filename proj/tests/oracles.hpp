#pragma once

// Independent reference implementations used only by tests. None of these
// call into the miner or imputer code paths they check.

#include "hmit/dataset.hpp"
#include "hmit/itemset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace hmit::oracle {

struct Frequent {
    std::vector<Item> items;  // sorted
    std::size_t count = 0;
    friend auto operator<=>(const Frequent&, const Frequent&) = default;
};

struct Rule {
    std::vector<Item> antecedent;
    Item consequent;
    std::size_t count = 0;
    std::size_t antecedent_count = 0;
    friend auto operator<=>(const Rule&, const Rule&) = default;
};

inline std::size_t scan_count(const std::vector<Item>& items, const std::vector<Itemset>& db) {
    std::size_t n = 0;
    for (const auto& t : db) {
        bool all = true;
        for (Item i : items)
            if (std::find(t.begin(), t.end(), i) == t.end()) all = false;
        n += all;
    }
    return n;
}

inline bool meets(std::size_t num, std::size_t den, double threshold) {
    return den > 0 && static_cast<double>(num) / static_cast<double>(den) >= threshold;
}

// Every subset of the observed items (at most one per attribute).
inline std::vector<Frequent> enumerate_frequent(const std::vector<Itemset>& db, double min_support,
                                                std::size_t max_len = 64) {
    std::set<Item> seen;
    for (const auto& t : db) seen.insert(t.begin(), t.end());
    const std::vector<Item> items(seen.begin(), seen.end());
    if (items.size() > 20) throw std::runtime_error("oracle: too many items");

    std::vector<Frequent> out;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << items.size()); ++mask) {
        std::vector<Item> s;
        std::set<std::uint32_t> attrs;
        bool ok = true;
        for (std::size_t b = 0; b < items.size(); ++b) {
            if (!(mask >> b & 1)) continue;
            ok &= attrs.insert(items[b].attribute).second;
            s.push_back(items[b]);
        }
        if (!ok || s.size() > max_len) continue;
        const std::size_t c = scan_count(s, db);
        if (meets(c, db.size(), min_support)) out.push_back({s, c});
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<Rule> enumerate_rules(const std::vector<Itemset>& db, double min_support, double min_confidence) {
    std::vector<Rule> out;
    for (const auto& f : enumerate_frequent(db, min_support)) {
        if (f.items.size() < 2) continue;
        for (std::size_t drop = 0; drop < f.items.size(); ++drop) {
            Rule r;
            for (std::size_t i = 0; i < f.items.size(); ++i)
                if (i != drop) r.antecedent.push_back(f.items[i]);
            r.consequent = f.items[drop];
            r.count = f.count;
            r.antecedent_count = scan_count(r.antecedent, db);
            if (meets(r.count, r.antecedent_count, min_confidence)) out.push_back(r);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// HEOM written term by term from the definition.
inline double heom(const Record& a, const Record& b, const std::vector<AttributeSchema>& schema,
                   const std::vector<double>& ranges) {
    double sum = 0.0;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        double term;
        if (!a.cells[i].has_value() || !b.cells[i].has_value())
            term = 1.0;
        else if (schema[i].kind == AttributeKind::categorical)
            term = a.cells[i]->text == b.cells[i]->text ? 0.0 : 1.0;
        else if (ranges[i] == 0.0)
            term = a.cells[i]->number == b.cells[i]->number ? 0.0 : 1.0;
        else
            term = std::fabs(a.cells[i]->number - b.cells[i]->number) / ranges[i];
        sum += term * term;
    }
    return std::sqrt(sum);
}

inline std::vector<double> ranges(const Dataset& d) {
    std::vector<double> out(d.attribute_count(), 0.0);
    for (std::size_t a = 0; a < d.attribute_count(); ++a) {
        if (d.attribute(a).kind != AttributeKind::numeric) continue;
        std::vector<double> v;
        for (const auto& r : d.records())
            if (r.cells[a]) v.push_back(r.cells[a]->number);
        if (!v.empty()) out[a] = *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end());
    }
    return out;
}

// Full sort of every candidate by (distance, row); first k.
inline std::vector<std::size_t> knn_rows(const Dataset& d, std::size_t row, std::size_t target, std::size_t k) {
    const auto rg = ranges(d);
    std::vector<std::pair<double, std::size_t>> all;
    for (const auto& r : d.records())
        if (r.id != row && r.cells[target]) all.emplace_back(heom(d.record(row), r, d.schema(), rg), r.id);
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < all.size() && i < k; ++i) out.push_back(all[i].second);
    return out;
}

// Majority (ties to lowest level index) or mean over the given rows.
inline std::string knn_value(const Dataset& d, const std::vector<std::size_t>& rows, std::size_t target,
                             double* numeric = nullptr) {
    const auto& a = d.attribute(target);
    if (a.kind == AttributeKind::numeric) {
        double s = 0.0;
        for (auto r : rows) s += d.cell(r, target)->number;
        if (numeric) *numeric = s / static_cast<double>(rows.size());
        return {};
    }
    std::map<std::uint32_t, std::size_t> votes;
    for (auto r : rows) ++votes[d.cell(r, target)->level];
    std::uint32_t best = 0;
    std::size_t best_votes = 0;
    for (auto [level, n] : votes)
        if (n > best_votes) {
            best = level;
            best_votes = n;
        }
    return a.levels[best];
}

}  // namespace hmit::oracle
