#pragma once

#include "hmit/dataset.hpp"
#include "hmit/discretizer.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace hmit {

// An attribute=value assignment. `level` is a categorical level index or a
// numeric bin index.
struct Item {
    std::uint32_t attribute = 0;
    std::uint32_t level = 0;

    friend auto operator<=>(const Item&, const Item&) = default;
};

// Items sorted by attribute, at most one per attribute.
class Itemset {
public:
    Itemset() = default;
    Itemset(std::initializer_list<Item> items);
    explicit Itemset(std::vector<Item> items);

    // Throws ParameterError when the attribute already holds another level.
    void insert(Item item);
    bool erase(Item item);
    Itemset without(Item item) const;
    Itemset with(Item item) const;

    bool contains(Item item) const;
    bool has_attribute(std::uint32_t attribute) const;
    bool is_subset_of(const Itemset& other) const;

    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    const std::vector<Item>& items() const { return items_; }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    // Lexicographic on items.
    friend auto operator<=>(const Itemset&, const Itemset&) = default;

private:
    std::vector<Item> items_;
};

// Orders by length, then lexicographically.
struct CanonicalOrder {
    bool operator()(const Itemset& a, const Itemset& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

struct ItemsetHash {
    std::size_t operator()(const Itemset& s) const noexcept;
};

// Turns records into itemsets: categorical cells map to their level, numeric
// cells to their bin. Missing cells and excluded attributes contribute nothing.
class ItemEncoder {
public:
    ItemEncoder(std::vector<AttributeSchema> schema, Binnings binnings,
                std::vector<bool> excluded = {});

    Itemset itemize(const Record& record) const;
    // Same itemset as itemize(); the evidence compared against rule antecedents.
    Itemset known_items(const Record& record) const { return itemize(record); }

    std::vector<Itemset> itemize(const Dataset& dataset) const;

    const std::vector<AttributeSchema>& schema() const { return schema_; }
    const Binnings& binnings() const { return binnings_; }
    bool excluded(std::size_t attribute) const { return excluded_[attribute]; }

    // Number of distinct levels (or bins) the attribute can take.
    std::size_t level_count(std::size_t attribute) const;
    std::string describe(Item item) const;

private:
    std::vector<AttributeSchema> schema_;
    Binnings binnings_;
    std::vector<bool> excluded_;
};

Itemset itemize(const Record& record, const std::vector<AttributeSchema>& schema, const Binnings& binnings);
Itemset known_items(const Record& record, const std::vector<AttributeSchema>& schema,
                    const Binnings& binnings);

}  // namespace hmit
