#pragma once

#include "hmit/dataset.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace hmit {

enum class BinningStrategy { equal_width, equal_frequency };

std::string_view to_string(BinningStrategy strategy);
BinningStrategy binning_strategy_from_string(std::string_view text);

// Cut points over a numeric attribute. Bin i covers [edges[i], edges[i+1]),
// the last bin is closed on the right. A constant column yields the single
// degenerate bin [v, v].
struct Bins {
    std::vector<double> edges;
    std::vector<double> representatives;

    std::size_t size() const { return representatives.size(); }
    friend bool operator==(const Bins&, const Bins&) = default;
};

Bins fit_bins(std::span<const double> values, std::size_t n_bins, BinningStrategy strategy);

// Total: values outside the fitted range clamp to the first or last bin.
std::size_t bin_of(double value, const Bins& bins);

struct BinningOptions {
    std::size_t n_bins = 5;
    BinningStrategy strategy = BinningStrategy::equal_frequency;
};

// One entry per attribute; engaged for numeric attributes only.
using Binnings = std::vector<std::optional<Bins>>;

// Fits every numeric attribute from its present values. An all-missing
// numeric column is an error.
Binnings fit_binnings(const Dataset& dataset, const BinningOptions& options = {});

}  // namespace hmit
