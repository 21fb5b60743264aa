#include "hmit/itemset.hpp"

#include "hmit/error.hpp"

#include <algorithm>

namespace hmit {

Itemset::Itemset(std::initializer_list<Item> items) {
    for (Item i : items) insert(i);
}

Itemset::Itemset(std::vector<Item> items) {
    for (Item i : items) insert(i);
}

void Itemset::insert(Item item) {
    auto it = std::lower_bound(items_.begin(), items_.end(), item,
                               [](Item a, Item b) { return a.attribute < b.attribute; });
    if (it != items_.end() && it->attribute == item.attribute) {
        if (it->level == item.level) return;
        throw ParameterError("itemset already holds attribute " + std::to_string(item.attribute));
    }
    items_.insert(it, item);
}

bool Itemset::erase(Item item) {
    auto it = std::lower_bound(items_.begin(), items_.end(), item);
    if (it == items_.end() || *it != item) return false;
    items_.erase(it);
    return true;
}

Itemset Itemset::without(Item item) const {
    Itemset out = *this;
    out.erase(item);
    return out;
}

Itemset Itemset::with(Item item) const {
    Itemset out = *this;
    out.insert(item);
    return out;
}

bool Itemset::contains(Item item) const {
    return std::binary_search(items_.begin(), items_.end(), item);
}

bool Itemset::has_attribute(std::uint32_t attribute) const {
    return std::any_of(items_.begin(), items_.end(), [&](Item i) { return i.attribute == attribute; });
}

bool Itemset::is_subset_of(const Itemset& other) const {
    return std::includes(other.items_.begin(), other.items_.end(), items_.begin(), items_.end());
}

std::size_t ItemsetHash::operator()(const Itemset& s) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (Item i : s) {
        std::uint64_t v = (static_cast<std::uint64_t>(i.attribute) << 32) | i.level;
        h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

// ---------------------------------------------------------------------------

ItemEncoder::ItemEncoder(std::vector<AttributeSchema> schema, Binnings binnings, std::vector<bool> excluded)
    : schema_(std::move(schema)), binnings_(std::move(binnings)), excluded_(std::move(excluded)) {
    if (excluded_.empty()) excluded_.assign(schema_.size(), false);
    if (binnings_.size() != schema_.size() || excluded_.size() != schema_.size())
        throw ParameterError("encoder: binnings/exclusions do not match schema width");
    for (std::size_t a = 0; a < schema_.size(); ++a)
        if (schema_[a].is_numeric() && !binnings_[a])
            throw ParameterError("encoder: numeric attribute '" + schema_[a].name + "' has no bins");
}

Itemset ItemEncoder::itemize(const Record& record) const {
    if (record.cells.size() != schema_.size()) throw DataError("record width does not match schema");
    std::vector<Item> items;
    items.reserve(record.cells.size());
    for (std::size_t a = 0; a < record.cells.size(); ++a) {
        const Cell& c = record.cells[a];
        if (!c || excluded_[a]) continue;
        const auto level = schema_[a].is_numeric() ? bin_of(c->number, *binnings_[a]) : c->level;
        items.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(level)});
    }
    return Itemset(std::move(items));
}

std::vector<Itemset> ItemEncoder::itemize(const Dataset& dataset) const {
    std::vector<Itemset> out;
    out.reserve(dataset.record_count());
    for (const auto& rec : dataset.records()) out.push_back(itemize(rec));
    return out;
}

std::size_t ItemEncoder::level_count(std::size_t attribute) const {
    const auto& a = schema_.at(attribute);
    return a.is_numeric() ? binnings_[attribute]->size() : a.levels.size();
}

std::string ItemEncoder::describe(Item item) const {
    const auto& a = schema_.at(item.attribute);
    if (!a.is_numeric()) return a.name + "=" + a.levels.at(item.level);
    const Bins& b = *binnings_[item.attribute];
    const bool last = item.level + 1 == b.size();
    return a.name + "=[" + format_number(b.edges.at(item.level)) + "," +
           format_number(b.edges.at(item.level + 1)) + (last ? "]" : ")");
}

Itemset itemize(const Record& record, const std::vector<AttributeSchema>& schema, const Binnings& binnings) {
    return ItemEncoder(schema, binnings).itemize(record);
}

Itemset known_items(const Record& record, const std::vector<AttributeSchema>& schema,
                    const Binnings& binnings) {
    return itemize(record, schema, binnings);
}

}  // namespace hmit
