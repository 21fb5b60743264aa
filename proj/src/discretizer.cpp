#include "hmit/discretizer.hpp"

#include "hmit/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hmit {

std::string_view to_string(BinningStrategy strategy) {
    return strategy == BinningStrategy::equal_width ? "equal-width" : "equal-frequency";
}

BinningStrategy binning_strategy_from_string(std::string_view text) {
    if (text == "equal-width") return BinningStrategy::equal_width;
    if (text == "equal-frequency") return BinningStrategy::equal_frequency;
    throw ParameterError("unknown binning strategy '" + std::string(text) + "'");
}

namespace {

Bins single_bin(double lo, double hi, double representative) {
    return Bins{{lo, hi}, {representative}};
}

Bins fit_equal_width(double lo, double hi, std::size_t n_bins) {
    Bins bins;
    const double width = (hi - lo) / static_cast<double>(n_bins);
    bins.edges.reserve(n_bins + 1);
    for (std::size_t i = 0; i < n_bins; ++i) bins.edges.push_back(lo + width * static_cast<double>(i));
    bins.edges.push_back(hi);
    for (std::size_t i = 0; i < n_bins; ++i)
        bins.representatives.push_back(0.5 * (bins.edges[i] + bins.edges[i + 1]));
    return bins;
}

// Cuts fall between two distinct sorted values, at the distinct-value
// boundary closest to each quantile position (ties go to the later
// boundary). Quantiles that land on the same boundary merge.
Bins fit_equal_frequency(const std::vector<double>& sorted, std::size_t n_bins) {
    const std::size_t n = sorted.size();
    std::vector<std::size_t> boundaries;  // p: sorted[p-1] < sorted[p]
    for (std::size_t p = 1; p < n; ++p)
        if (sorted[p - 1] < sorted[p]) boundaries.push_back(p);

    std::vector<std::size_t> cuts;
    for (std::size_t i = 1; i < n_bins && !boundaries.empty(); ++i) {
        const double target = static_cast<double>(i) * static_cast<double>(n) / static_cast<double>(n_bins);
        auto best = boundaries.front();
        double best_gap = std::abs(static_cast<double>(best) - target);
        for (std::size_t p : boundaries) {
            double gap = std::abs(static_cast<double>(p) - target);
            if (gap <= best_gap) {
                best = p;
                best_gap = gap;
            }
        }
        if (cuts.empty() || cuts.back() < best) cuts.push_back(best);
    }

    Bins bins;
    bins.edges.push_back(sorted.front());
    for (std::size_t p : cuts) bins.edges.push_back(0.5 * (sorted[p - 1] + sorted[p]));
    bins.edges.push_back(sorted.back());

    std::size_t begin = 0;
    cuts.push_back(n);
    for (std::size_t end : cuts) {
        // lower median of the training values in [begin, end)
        bins.representatives.push_back(sorted[begin + (end - begin - 1) / 2]);
        begin = end;
    }
    return bins;
}

}  // namespace

Bins fit_bins(std::span<const double> values, std::size_t n_bins, BinningStrategy strategy) {
    if (n_bins == 0) throw ParameterError("n_bins must be at least 1");
    if (values.empty()) throw ParameterError("cannot fit bins without values");
    std::vector<double> sorted(values.begin(), values.end());
    for (double v : sorted)
        if (!std::isfinite(v)) throw ParameterError("cannot fit bins on non-finite values");
    std::sort(sorted.begin(), sorted.end());

    const double lo = sorted.front();
    const double hi = sorted.back();
    if (lo == hi) return single_bin(lo, hi, lo);
    if (n_bins == 1) {
        if (strategy == BinningStrategy::equal_width) return single_bin(lo, hi, 0.5 * (lo + hi));
        return single_bin(lo, hi, sorted[(sorted.size() - 1) / 2]);
    }
    return strategy == BinningStrategy::equal_width ? fit_equal_width(lo, hi, n_bins)
                                                    : fit_equal_frequency(sorted, n_bins);
}

std::size_t bin_of(double value, const Bins& bins) {
    if (bins.size() <= 1) return 0;
    auto first = bins.edges.begin() + 1;
    auto last = bins.edges.end() - 1;
    return static_cast<std::size_t>(std::upper_bound(first, last, value) - first);
}

Binnings fit_binnings(const Dataset& dataset, const BinningOptions& options) {
    Binnings out(dataset.attribute_count());
    for (std::size_t a = 0; a < dataset.attribute_count(); ++a) {
        if (!dataset.attribute(a).is_numeric()) continue;
        std::vector<double> values;
        for (const auto& rec : dataset.records())
            if (rec.cells[a]) values.push_back(rec.cells[a]->number);
        if (values.empty())
            throw DataError("numeric attribute '" + dataset.attribute(a).name + "' has no present values");
        out[a] = fit_bins(values, options.n_bins, options.strategy);
    }
    return out;
}

}  // namespace hmit
