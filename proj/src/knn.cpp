#include "hmit/knn.hpp"

#include "hmit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hmit {

void KnnParams::validate() const {
    if (k < 1) throw ParameterError("k must be at least 1");
}

std::vector<double> fit_ranges(const Dataset& dataset) {
    std::vector<double> ranges(dataset.attribute_count(), 0.0);
    for (std::size_t a = 0; a < dataset.attribute_count(); ++a) {
        if (!dataset.attribute(a).is_numeric()) continue;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& rec : dataset.records()) {
            if (!rec.cells[a]) continue;
            lo = std::min(lo, rec.cells[a]->number);
            hi = std::max(hi, rec.cells[a]->number);
        }
        if (lo <= hi) ranges[a] = hi - lo;
    }
    return ranges;
}

double heom_distance(const Record& a, const Record& b, const std::vector<AttributeSchema>& schema,
                     std::span<const double> ranges, const std::vector<bool>& ignored) {
    double sum = 0.0;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (!ignored.empty() && ignored[i]) continue;
        const Cell& x = a.cells[i];
        const Cell& y = b.cells[i];
        double d;
        if (!x || !y) {
            d = 1.0;
        } else if (!schema[i].is_numeric()) {
            d = x->level == y->level ? 0.0 : 1.0;
        } else if (ranges[i] > 0.0) {
            d = std::abs(x->number - y->number) / ranges[i];
        } else {
            d = x->number == y->number ? 0.0 : 1.0;
        }
        sum += d * d;
    }
    return std::sqrt(sum);
}

KnnImputer::KnnImputer(const Dataset& dataset, KnnParams params, std::vector<bool> ignored)
    : dataset_(&dataset), params_(params), ranges_(fit_ranges(dataset)), ignored_(std::move(ignored)) {
    params_.validate();
    if (!ignored_.empty() && ignored_.size() != dataset.attribute_count())
        throw ParameterError("ignored-attribute mask does not match schema width");
}

std::vector<Neighbor> KnnImputer::neighbors(const Record& query, std::size_t target) const {
    std::vector<Neighbor> all;
    for (const auto& rec : dataset_->records()) {
        if (rec.id == query.id || !rec.cells[target]) continue;
        all.push_back({rec.id, heom_distance(query, rec, dataset_->schema(), ranges_, ignored_)});
    }
    const std::size_t k = std::min(params_.k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                      [](const Neighbor& x, const Neighbor& y) {
                          return x.distance != y.distance ? x.distance < y.distance : x.row < y.row;
                      });
    all.resize(k);
    return all;
}

Value KnnImputer::vote(std::size_t target, std::span<const std::size_t> rows) const {
    const auto& attribute = dataset_->attribute(target);
    if (attribute.is_numeric()) {
        double sum = 0.0;
        for (auto r : rows) sum += dataset_->cell(r, target)->number;
        return numeric_value(sum / static_cast<double>(rows.size()));
    }
    std::vector<std::size_t> counts(attribute.levels.size(), 0);
    for (auto r : rows) ++counts[dataset_->cell(r, target)->level];
    auto best = std::max_element(counts.begin(), counts.end());  // first maximum = lowest level
    return categorical_value(attribute, static_cast<std::uint32_t>(best - counts.begin()));
}

KnnResult KnnImputer::impute(const Record& query, std::size_t target) const {
    KnnResult out;
    for (const auto& n : neighbors(query, target)) out.neighbors.push_back(n.row);
    if (!out.neighbors.empty()) {
        out.value = vote(target, out.neighbors);
        return out;
    }
    std::vector<std::size_t> known;
    for (const auto& rec : dataset_->records())
        if (rec.cells[target]) known.push_back(rec.id);
    if (known.empty())
        throw ImputationError("attribute '" + dataset_->attribute(target).name + "' has no known value");
    out.value = vote(target, known);
    out.global_fallback = true;
    return out;
}

Value impute_knn(const Record& record, std::size_t target_attribute, const Dataset& dataset,
                 const KnnParams& params) {
    return KnnImputer(dataset, params).impute(record, target_attribute).value;
}

}  // namespace hmit
