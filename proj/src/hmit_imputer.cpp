#include "hmit/hmit_imputer.hpp"

#include "hmit/error.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace hmit {

using nlohmann::json;

std::string_view to_string(ImputationSource source) {
    return source == ImputationSource::rules ? "rules" : "knn";
}

double ImputationReport::rule_coverage() const {
    return cells.empty() ? 0.0 : static_cast<double>(by_rules) / static_cast<double>(cells.size());
}

FiredSet fire_rules(const Itemset& known, std::size_t target_attribute, const RuleIndex& index) {
    FiredSet fired;
    fired.attribute = target_attribute;
    const auto& rules = index.rules();
    for (std::size_t i : index.for_attribute(target_attribute))
        if (rules[i].antecedent.is_subset_of(known)) fired.rules.push_back(i);

    std::sort(fired.rules.begin(), fired.rules.end(), [&](std::size_t x, std::size_t y) {
        const auto& a = rules[x];
        const auto& b = rules[y];
        if (int c = compare_confidence(a, b); c != 0) return c > 0;
        if (a.support_count != b.support_count) return a.support_count > b.support_count;
        if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
        return x < y;
    });
    return fired;
}

Value impute_from_rules(const FiredSet& fired, std::span<const AssociationRule> rules,
                        const AttributeSchema& attribute, const Bins* bins) {
    if (fired.empty()) throw std::logic_error("impute_from_rules: empty fired set");

    if (attribute.is_numeric()) {
        if (!bins) throw std::logic_error("impute_from_rules: numeric attribute without bins");
        std::vector<double> reps;
        for (auto i : fired.rules) reps.push_back(bins->representatives.at(rules[i].consequent.level));
        std::sort(reps.begin(), reps.end());
        const std::size_t m = reps.size();
        const double median = m % 2 ? reps[m / 2] : 0.5 * (reps[m / 2 - 1] + reps[m / 2]);
        return numeric_value(median);
    }

    struct Tally {
        std::size_t votes = 0;
        const AssociationRule* best = nullptr;
    };
    std::vector<Tally> tally(attribute.levels.size());
    for (auto i : fired.rules) {
        const auto& r = rules[i];
        auto& t = tally.at(r.consequent.level);
        ++t.votes;
        if (!t.best) {
            t.best = &r;
            continue;
        }
        int c = compare_confidence(r, *t.best);
        if (c > 0 || (c == 0 && r.support_count > t.best->support_count)) t.best = &r;
    }

    std::size_t winner = tally.size();
    for (std::size_t level = 0; level < tally.size(); ++level) {
        const auto& t = tally[level];
        if (!t.votes) continue;
        if (winner == tally.size()) {
            winner = level;
            continue;
        }
        const auto& w = tally[winner];
        bool better = false;
        if (t.votes != w.votes) {
            better = t.votes > w.votes;
        } else if (int c = compare_confidence(*t.best, *w.best); c != 0) {
            better = c > 0;
        } else {
            better = t.best->support_count > w.best->support_count;
        }
        if (better) winner = level;
    }
    return categorical_value(attribute, static_cast<std::uint32_t>(winner));
}

// ---------------------------------------------------------------------------

namespace {

void require_matching_schema(const RuleSet& rules, const Dataset& dataset) {
    if (rules.schema.size() != dataset.attribute_count())
        throw DataError("schema mismatch: rules cover " + std::to_string(rules.schema.size()) +
                        " attributes, dataset has " + std::to_string(dataset.attribute_count()));
    for (std::size_t a = 0; a < rules.schema.size(); ++a) {
        const auto& r = rules.schema[a];
        const auto& d = dataset.attribute(a);
        if (r.name != d.name || r.kind != d.kind)
            throw DataError("schema mismatch at attribute '" + d.name + "'");
        // Rule levels must index the same labels as the dataset's.
        if (!r.is_numeric() && !std::equal(r.levels.begin(), r.levels.end(), d.levels.begin(),
                                           d.levels.begin() + static_cast<std::ptrdiff_t>(
                                                                  std::min(r.levels.size(), d.levels.size()))))
            throw DataError("schema mismatch: levels of '" + d.name + "' differ (bind the rules first)");
        if (!r.is_numeric() && r.levels.size() > d.levels.size())
            throw DataError("schema mismatch: levels of '" + d.name + "' differ (bind the rules first)");
    }
}

}  // namespace

HmitImputer::HmitImputer(const Dataset& dataset, const RuleSet& rules, KnnParams knn, std::vector<bool> excluded)
    : dataset_(&dataset), rules_(&rules), knn_(dataset, knn, std::move(excluded)) {
    require_matching_schema(rules, dataset);
    index_ = RuleIndex(rules.rules, dataset.attribute_count());
    const auto encoder = rules.encoder();
    known_.reserve(dataset.record_count());
    for (const auto& rec : dataset.records()) known_.push_back(encoder.known_items(rec));
}

FiredSet HmitImputer::fire(std::size_t row, std::size_t attribute) const {
    return fire_rules(known_.at(row), attribute, index_);
}

CellImputation HmitImputer::impute_cell(std::size_t row, std::size_t attribute) const {
    CellImputation out;
    out.row = row;
    out.attribute = attribute;
    FiredSet fired = fire(row, attribute);
    if (!fired.empty()) {
        const auto& bins = rules_->binnings[attribute];
        out.value = impute_from_rules(fired, index_.rules(), dataset_->attribute(attribute),
                                      bins ? &*bins : nullptr);
        out.source = ImputationSource::rules;
        out.fired_rules = std::move(fired.rules);
        return out;
    }
    auto knn = knn_.impute(dataset_->record(row), attribute);
    out.value = std::move(knn.value);
    out.source = ImputationSource::knn;
    out.neighbors = std::move(knn.neighbors);
    out.global_fallback = knn.global_fallback;
    return out;
}

CellImputation impute_cell(const Record& record, std::size_t attribute, const RuleSet& rules,
                           const KnnParams& knn, const Dataset& dataset) {
    if (record.id >= dataset.record_count() || dataset.record(record.id).cells != record.cells)
        throw ParameterError("impute_cell: record is not part of the dataset");
    if (record.cells.at(attribute)) throw ParameterError("impute_cell: target cell is not missing");
    return HmitImputer(dataset, rules, knn).impute_cell(record.id, attribute);
}

namespace {

using CellFn = std::function<CellImputation(std::size_t, std::size_t)>;

ImputationResult run_imputation(const Dataset& dataset, std::size_t threads, const CellFn& impute_one) {
    std::vector<std::pair<std::size_t, std::size_t>> targets;
    for (const auto& rec : dataset.records())
        for (std::size_t a = 0; a < rec.cells.size(); ++a)
            if (!rec.cells[a]) targets.emplace_back(rec.id, a);

    ImputationResult result{dataset, {}};
    auto& report = result.report;
    report.cells.resize(targets.size());

    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(targets.size(), 1));
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            report.cells[i] = impute_one(targets[i].first, targets[i].second);
    };
    if (workers == 1) {
        work(0, targets.size());
    } else {
        std::vector<std::exception_ptr> errors(workers);
        {
            std::vector<std::jthread> pool;
            const std::size_t chunk = (targets.size() + workers - 1) / workers;
            for (std::size_t w = 0; w < workers; ++w) {
                const std::size_t begin = std::min(w * chunk, targets.size());
                const std::size_t end = std::min(begin + chunk, targets.size());
                pool.emplace_back([&, w, begin, end] {
                    try {
                        work(begin, end);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
        }
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    report.per_attribute.resize(dataset.attribute_count());
    for (const auto& c : report.cells) {
        result.completed.set_cell(c.row, c.attribute, c.value);
        auto& stats = report.per_attribute[c.attribute];
        ++stats.imputed;
        if (c.source == ImputationSource::rules) {
            ++stats.by_rules;
            ++report.by_rules;
        } else {
            ++stats.by_knn;
            ++report.by_knn;
        }
    }
    return result;
}

}  // namespace

ImputationResult impute_dataset(const Dataset& dataset, const RuleSet& rules, const ImputeParams& params) {
    HmitImputer imputer(dataset, rules, params.knn, params.excluded);
    auto result = run_imputation(dataset, params.threads,
                                 [&](std::size_t row, std::size_t a) { return imputer.impute_cell(row, a); });
    result.report.parameters = {{"method", "hmit"},
                                {"mining", to_json(rules.params)},
                                {"binning", to_json(rules.binning)},
                                {"rule_count", rules.rules.size()},
                                {"k", params.knn.k},
                                {"distance", "heom"}};
    return result;
}

ImputationResult impute_dataset_knn(const Dataset& dataset, const ImputeParams& params) {
    KnnImputer knn(dataset, params.knn, params.excluded);
    auto result = run_imputation(dataset, params.threads, [&](std::size_t row, std::size_t a) {
        auto r = knn.impute(dataset.record(row), a);
        CellImputation c;
        c.row = row;
        c.attribute = a;
        c.value = std::move(r.value);
        c.source = ImputationSource::knn;
        c.neighbors = std::move(r.neighbors);
        c.global_fallback = r.global_fallback;
        return c;
    });
    result.report.parameters = {{"method", "knn"}, {"k", params.knn.k}, {"distance", "heom"}};
    return result;
}

json to_json(const ImputationReport& report, const Dataset& dataset) {
    json cells = json::array();
    for (const auto& c : report.cells) {
        json entry = {{"row", c.row},
                      {"column", dataset.attribute(c.attribute).name},
                      {"value", c.value.text},
                      {"source", std::string(to_string(c.source))}};
        if (c.source == ImputationSource::rules) {
            entry["fired_rules"] = c.fired_rules;
        } else {
            entry["neighbors"] = c.neighbors;
            if (c.global_fallback) entry["global_fallback"] = true;
        }
        cells.push_back(std::move(entry));
    }
    json per_attribute = json::object();
    for (std::size_t a = 0; a < report.per_attribute.size(); ++a) {
        const auto& s = report.per_attribute[a];
        if (!s.imputed) continue;
        per_attribute[dataset.attribute(a).name] = {
            {"imputed", s.imputed}, {"by_rules", s.by_rules}, {"by_knn", s.by_knn}};
    }
    return {{"parameters", report.parameters},
            {"summary",
             {{"imputed", report.total()},
              {"by_rules", report.by_rules},
              {"by_knn", report.by_knn},
              {"rule_coverage", report.rule_coverage()}}},
            {"per_attribute", std::move(per_attribute)},
            {"cells", std::move(cells)}};
}

}  // namespace hmit
