#include "hmit/rule_set.hpp"

#include "hmit/error.hpp"

#include <istream>
#include <ostream>
#include <string>

namespace hmit {

using nlohmann::json;

RuleSet mine_rules(const Dataset& dataset, const MiningParams& params, const BinningOptions& binning,
                   std::vector<bool> excluded) {
    params.validate();
    if (excluded.empty()) excluded.assign(dataset.attribute_count(), false);
    RuleSet out;
    out.schema = dataset.schema();
    out.binnings = fit_binnings(dataset, binning);
    out.excluded = std::move(excluded);
    out.params = params;
    out.binning = binning;
    out.record_count = dataset.record_count();

    const auto db = out.encoder().itemize(dataset);
    const auto frequents = mine_frequent(db, params);
    out.rules = generate_rules(frequents, params);
    return out;
}

json to_json(const Bins& bins) {
    return {{"edges", bins.edges}, {"representatives", bins.representatives}};
}

json to_json(const MiningParams& params) {
    json j = {{"min_support", params.min_support}, {"min_confidence", params.min_confidence}};
    j["min_support_count"] = params.min_support_count ? json(*params.min_support_count) : json(nullptr);
    j["max_antecedent_len"] = params.max_antecedent_len ? json(*params.max_antecedent_len) : json(nullptr);
    return j;
}

json to_json(const BinningOptions& options) {
    return {{"n_bins", options.n_bins}, {"strategy", std::string(to_string(options.strategy))}};
}

namespace {

json item_json(Item item, const std::vector<AttributeSchema>& schema) {
    const auto& a = schema.at(item.attribute);
    if (a.is_numeric()) return {{"attribute", a.name}, {"bin", item.level}};
    return {{"attribute", a.name}, {"level", a.levels.at(item.level)}};
}

Item item_from_json(const json& j, const std::vector<AttributeSchema>& schema, const Binnings& binnings) {
    const auto name = j.at("attribute").get<std::string>();
    for (std::uint32_t a = 0; a < schema.size(); ++a) {
        if (schema[a].name != name) continue;
        if (schema[a].is_numeric()) {
            auto bin = j.at("bin").get<std::uint32_t>();
            if (bin >= binnings[a]->size()) throw DataError("rule file: bin out of range for '" + name + "'");
            return {a, bin};
        }
        auto level = schema[a].find_level(j.at("level").get<std::string>());
        if (!level) throw DataError("rule file: unknown level for '" + name + "'");
        return {a, *level};
    }
    throw DataError("rule file: unknown attribute '" + name + "'");
}

}  // namespace

json describe_rule(const AssociationRule& rule, const std::vector<AttributeSchema>& schema) {
    json antecedent = json::array();
    for (Item i : rule.antecedent) antecedent.push_back(item_json(i, schema));
    return {{"antecedent", std::move(antecedent)},
            {"consequent", item_json(rule.consequent, schema)},
            {"support", rule.support},
            {"confidence", rule.confidence},
            {"support_count", rule.support_count},
            {"antecedent_count", rule.antecedent_count}};
}

void write_rules_jsonl(const RuleSet& rules, std::ostream& out) {
    json attributes = json::array();
    for (std::size_t a = 0; a < rules.schema.size(); ++a) {
        const auto& s = rules.schema[a];
        json entry = {{"name", s.name}, {"kind", std::string(to_string(s.kind))}, {"excluded", bool(rules.excluded[a])}};
        if (s.is_numeric())
            entry["bins"] = to_json(*rules.binnings[a]);
        else
            entry["levels"] = s.levels;
        attributes.push_back(std::move(entry));
    }
    json header = {{"format", "hmit-rules"},
                   {"version", 1},
                   {"records", rules.record_count},
                   {"rule_count", rules.rules.size()},
                   {"mining", to_json(rules.params)},
                   {"binning", to_json(rules.binning)},
                   {"attributes", std::move(attributes)}};
    out << header.dump() << '\n';
    for (const auto& r : rules.rules) out << describe_rule(r, rules.schema).dump() << '\n';
}

RuleSet read_rules_jsonl(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    };
    auto parse = [&]() {
        try {
            return json::parse(line);
        } catch (const json::exception& e) {
            throw DataError("rule file line " + std::to_string(line_no) + ": " + e.what());
        }
    };

    if (!next_line()) throw DataError("rule file is empty");
    RuleSet out;
    try {
        json header = parse();
        if (header.value("format", "") != "hmit-rules") throw DataError("not an hmit rule file");
        out.record_count = header.at("records").get<std::size_t>();
        const auto& m = header.at("mining");
        out.params.min_support = m.at("min_support").get<double>();
        out.params.min_confidence = m.at("min_confidence").get<double>();
        if (!m.at("min_support_count").is_null()) out.params.min_support_count = m["min_support_count"].get<std::size_t>();
        if (!m.at("max_antecedent_len").is_null())
            out.params.max_antecedent_len = m["max_antecedent_len"].get<std::size_t>();
        out.params.validate();
        out.binning.n_bins = header.at("binning").at("n_bins").get<std::size_t>();
        out.binning.strategy = binning_strategy_from_string(header["binning"].at("strategy").get<std::string>());

        for (const auto& a : header.at("attributes")) {
            AttributeSchema s;
            s.name = a.at("name").get<std::string>();
            s.kind = attribute_kind_from_string(a.at("kind").get<std::string>());
            std::optional<Bins> bins;
            if (s.is_numeric()) {
                Bins b{a.at("bins").at("edges").get<std::vector<double>>(),
                       a["bins"].at("representatives").get<std::vector<double>>()};
                if (b.representatives.empty() || b.edges.size() != b.representatives.size() + 1)
                    throw DataError("rule file: malformed bins for '" + s.name + "'");
                bins = std::move(b);
            } else {
                s.levels = a.at("levels").get<std::vector<std::string>>();
            }
            out.excluded.push_back(a.value("excluded", false));
            out.schema.push_back(std::move(s));
            out.binnings.push_back(std::move(bins));
        }

        while (next_line()) {
            json j = parse();
            AssociationRule r;
            for (const auto& item : j.at("antecedent")) r.antecedent.insert(item_from_json(item, out.schema, out.binnings));
            r.consequent = item_from_json(j.at("consequent"), out.schema, out.binnings);
            if (r.antecedent.has_attribute(r.consequent.attribute))
                throw DataError("rule file line " + std::to_string(line_no) + ": consequent overlaps antecedent");
            r.support = j.at("support").get<double>();
            r.confidence = j.at("confidence").get<double>();
            r.support_count = j.at("support_count").get<std::size_t>();
            r.antecedent_count = j.at("antecedent_count").get<std::size_t>();
            out.rules.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw DataError("rule file line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ParameterError& e) {
        throw DataError("rule file line " + std::to_string(line_no) + ": " + e.what());
    }
    return out;
}

void bind_rules(RuleSet& rules, Dataset& dataset) {
    if (rules.schema.size() != dataset.attribute_count())
        throw DataError("schema mismatch: rules cover " + std::to_string(rules.schema.size()) +
                        " attributes, dataset has " + std::to_string(dataset.attribute_count()));
    for (std::size_t a = 0; a < rules.schema.size(); ++a) {
        const auto& mine = rules.schema[a];
        const auto& theirs = dataset.attribute(a);
        if (mine.name != theirs.name || mine.kind != theirs.kind)
            throw DataError("schema mismatch at column " + std::to_string(a + 1) + ": rules expect '" + mine.name +
                            "' (" + std::string(to_string(mine.kind)) + "), dataset has '" + theirs.name + "' (" +
                            std::string(to_string(theirs.kind)) + ")");
    }

    std::vector<std::vector<std::uint32_t>> remap(rules.schema.size());
    for (std::size_t a = 0; a < rules.schema.size(); ++a) {
        if (rules.schema[a].is_numeric()) continue;
        for (const auto& label : rules.schema[a].levels) remap[a].push_back(dataset.intern_level(a, label));
    }
    auto translate = [&](Item i) {
        if (rules.schema[i.attribute].is_numeric()) return i;
        return Item{i.attribute, remap[i.attribute].at(i.level)};
    };
    for (auto& r : rules.rules) {
        std::vector<Item> items;
        for (Item i : r.antecedent) items.push_back(translate(i));
        r.antecedent = Itemset(std::move(items));
        r.consequent = translate(r.consequent);
    }
    rules.schema = dataset.schema();
}

}  // namespace hmit
