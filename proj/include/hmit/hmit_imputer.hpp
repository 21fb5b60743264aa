#pragma once

#include "hmit/dataset.hpp"
#include "hmit/knn.hpp"
#include "hmit/rule_miner.hpp"
#include "hmit/rule_set.hpp"

#include "json.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace hmit {

// Rules whose antecedent is contained in a record's known items and whose
// consequent targets the missing attribute. `rules` index into the rule list
// the set was fired from, strongest first.
struct FiredSet {
    std::size_t attribute = 0;
    std::vector<std::size_t> rules;

    bool empty() const { return rules.empty(); }
};

FiredSet fire_rules(const Itemset& known, std::size_t target_attribute, const RuleIndex& index);

// Mode of the consequent levels (categorical) or median of the consequent
// bins' representatives (numeric). `bins` is required for numeric attributes.
// Throws std::logic_error on an empty fired set.
Value impute_from_rules(const FiredSet& fired, std::span<const AssociationRule> rules,
                        const AttributeSchema& attribute, const Bins* bins = nullptr);

enum class ImputationSource { rules, knn };

std::string_view to_string(ImputationSource source);

struct CellImputation {
    std::size_t row = 0;
    std::size_t attribute = 0;
    Value value;
    ImputationSource source = ImputationSource::knn;
    std::vector<std::size_t> fired_rules;  // source == rules
    std::vector<std::size_t> neighbors;    // source == knn
    bool global_fallback = false;
};

struct AttributeImputationStats {
    std::size_t imputed = 0;
    std::size_t by_rules = 0;
    std::size_t by_knn = 0;
};

struct ImputationReport {
    std::vector<CellImputation> cells;  // row-major order
    std::size_t by_rules = 0;
    std::size_t by_knn = 0;
    std::vector<AttributeImputationStats> per_attribute;
    nlohmann::json parameters = nlohmann::json::object();

    std::size_t total() const { return cells.size(); }
    // Fraction of imputed cells that came from fired rules; 0 when nothing
    // was imputed.
    double rule_coverage() const;
};

struct ImputeParams {
    KnnParams knn;
    std::size_t threads = 1;
    std::vector<bool> excluded;  // attributes withheld from kNN distances
};

// Imputes from a fixed, unmodified source dataset. Rules must already be
// bound to the dataset's schema (see bind_rules). The dataset and rule set
// must outlive the imputer.
class HmitImputer {
public:
    HmitImputer(const Dataset& dataset, const RuleSet& rules, KnnParams knn = {},
                std::vector<bool> excluded = {});

    FiredSet fire(std::size_t row, std::size_t attribute) const;
    CellImputation impute_cell(std::size_t row, std::size_t attribute) const;

    const RuleIndex& index() const { return index_; }
    const Itemset& known_items(std::size_t row) const { return known_.at(row); }
    const KnnImputer& knn() const { return knn_; }

private:
    const Dataset* dataset_;
    const RuleSet* rules_;
    RuleIndex index_;
    std::vector<Itemset> known_;
    KnnImputer knn_;
};

CellImputation impute_cell(const Record& record, std::size_t attribute, const RuleSet& rules,
                           const KnnParams& knn, const Dataset& dataset);

struct ImputationResult {
    Dataset completed;
    ImputationReport report;
};

// Imputes every missing cell of `dataset` from its original known values
// only. Throws DataError when the rules' schema does not match.
ImputationResult impute_dataset(const Dataset& dataset, const RuleSet& rules, const ImputeParams& params = {});

// Pure kNN baseline: every missing cell goes through kNN.
ImputationResult impute_dataset_knn(const Dataset& dataset, const ImputeParams& params = {});

nlohmann::json to_json(const ImputationReport& report, const Dataset& dataset);

}  // namespace hmit
