#pragma once

#include "hmit/itemset.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hmit {

struct MiningParams {
    double min_support = 0.40;
    double min_confidence = 0.60;
    // Absolute support threshold; overrides min_support when set.
    std::optional<std::size_t> min_support_count;
    // Longest antecedent to generate; frequent itemsets stop at one more item.
    std::optional<std::size_t> max_antecedent_len;

    void validate() const;
    bool is_frequent(std::size_t support_count, std::size_t db_size) const;
    bool is_confident(std::size_t rule_count, std::size_t antecedent_count) const;
};

struct FrequentItemset {
    Itemset itemset;
    std::size_t support_count = 0;
    double support = 0.0;

    friend bool operator==(const FrequentItemset&, const FrequentItemset&) = default;
};

// A -> b with a single-item consequent. Counts are kept so that thresholds
// and orderings can be evaluated exactly.
struct AssociationRule {
    Itemset antecedent;
    Item consequent;
    std::size_t support_count = 0;     // |records containing A u {b}|
    std::size_t antecedent_count = 0;  // |records containing A|
    double support = 0.0;
    double confidence = 0.0;

    friend bool operator==(const AssociationRule&, const AssociationRule&) = default;
};

// <0, 0, >0 as a's confidence is lower, equal, higher than b's.
int compare_confidence(const AssociationRule& a, const AssociationRule& b);

using ItemizedDb = std::vector<Itemset>;

std::size_t support_count(const Itemset& itemset, std::span<const Itemset> db);

// All non-empty frequent itemsets in canonical order (length, then items).
std::vector<FrequentItemset> mine_frequent(std::span<const Itemset> db, const MiningParams& params);

// Rules S\{b} -> b for every frequent S with |S| >= 2. Ordered by consequent
// attribute, confidence descending, antecedent, consequent level.
std::vector<AssociationRule> generate_rules(std::span<const FrequentItemset> frequents,
                                            const MiningParams& params);

std::vector<AssociationRule> rules_for_attribute(std::span<const AssociationRule> rules,
                                                 std::size_t attribute);

// Rules grouped by consequent attribute; indices refer to rules().
class RuleIndex {
public:
    RuleIndex() = default;
    RuleIndex(std::vector<AssociationRule> rules, std::size_t attribute_count);

    const std::vector<AssociationRule>& rules() const { return rules_; }
    std::span<const std::size_t> for_attribute(std::size_t attribute) const;
    std::size_t attribute_count() const { return by_attribute_.size(); }

private:
    std::vector<AssociationRule> rules_;
    std::vector<std::vector<std::size_t>> by_attribute_;
};

}  // namespace hmit
