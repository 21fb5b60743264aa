#pragma once

#include "hmit/dataset.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace hmit {

enum class DistanceMetric { heom };

struct KnnParams {
    std::size_t k = 10;
    DistanceMetric distance = DistanceMetric::heom;

    void validate() const;
};

// max - min of the present values of each numeric attribute; 0 for
// categorical attributes and for numeric attributes without values.
std::vector<double> fit_ranges(const Dataset& dataset);

// Heterogeneous Euclidean-overlap metric. A missing cell on either side
// contributes 1; categorical cells contribute 0/1 overlap; numeric cells
// contribute |a - b| / range (or 0/1 overlap when the range is 0).
// Attributes flagged in `ignored` contribute nothing.
double heom_distance(const Record& a, const Record& b, const std::vector<AttributeSchema>& schema,
                     std::span<const double> ranges, const std::vector<bool>& ignored = {});

struct Neighbor {
    std::size_t row = 0;
    double distance = 0.0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct KnnResult {
    Value value;
    std::vector<std::size_t> neighbors;  // rows that voted, nearest first
    bool global_fallback = false;
};

// Brute-force kNN imputation over the original (pre-imputation) values of
// `dataset`. The dataset must outlive the imputer.
class KnnImputer {
public:
    KnnImputer(const Dataset& dataset, KnnParams params, std::vector<bool> ignored = {});

    // Up to k rows other than `query.id` with a present value at `target`,
    // ordered by (distance, row).
    std::vector<Neighbor> neighbors(const Record& query, std::size_t target) const;

    // Majority vote (ties to the lowest level index) or mean over the
    // neighbors; the dataset-wide mode/mean when no neighbor exists.
    KnnResult impute(const Record& query, std::size_t target) const;

    const KnnParams& params() const { return params_; }
    std::span<const double> ranges() const { return ranges_; }

private:
    Value vote(std::size_t target, std::span<const std::size_t> rows) const;

    const Dataset* dataset_;
    KnnParams params_;
    std::vector<double> ranges_;
    std::vector<bool> ignored_;
};

Value impute_knn(const Record& record, std::size_t target_attribute, const Dataset& dataset,
                 const KnnParams& params);

}  // namespace hmit
