#pragma once

#include "hmit/dataset.hpp"
#include "hmit/discretizer.hpp"
#include "hmit/itemset.hpp"
#include "hmit/rule_miner.hpp"

#include "json.hpp"

#include <iosfwd>
#include <vector>

namespace hmit {

// Mined rules together with the vocabulary they speak: the schema and the
// numeric binnings used to itemize records.
struct RuleSet {
    std::vector<AttributeSchema> schema;
    Binnings binnings;
    std::vector<bool> excluded;  // attributes withheld from mining
    MiningParams params;
    BinningOptions binning;
    std::size_t record_count = 0;
    std::vector<AssociationRule> rules;

    ItemEncoder encoder() const { return ItemEncoder(schema, binnings, excluded); }
};

// Fits binnings on `dataset`, itemizes it, mines frequent itemsets and
// generates rules. Attributes flagged in `excluded` contribute no items.
RuleSet mine_rules(const Dataset& dataset, const MiningParams& params, const BinningOptions& binning = {},
                   std::vector<bool> excluded = {});

// Header line (schema, bins, parameters) followed by one rule per line.
void write_rules_jsonl(const RuleSet& rules, std::ostream& out);
RuleSet read_rules_jsonl(std::istream& in);

// Checks that `rules` were mined over the same attributes (names and kinds,
// in order) as `dataset` and re-expresses categorical levels in the
// dataset's level numbering. Labels unknown to the dataset are appended to
// its levels. Throws DataError on mismatch.
void bind_rules(RuleSet& rules, Dataset& dataset);

nlohmann::json to_json(const Bins& bins);
nlohmann::json to_json(const MiningParams& params);
nlohmann::json to_json(const BinningOptions& options);
nlohmann::json describe_rule(const AssociationRule& rule, const std::vector<AttributeSchema>& schema);

}  // namespace hmit
