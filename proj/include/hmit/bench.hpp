#pragma once

#include "hmit/dataset.hpp"
#include "hmit/discretizer.hpp"
#include "hmit/hmit_imputer.hpp"
#include "hmit/knn.hpp"
#include "hmit/rule_miner.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hmit {

struct TruthCell {
    std::size_t row = 0;
    std::size_t attribute = 0;
    Value value;
};

struct MaskedDataset {
    Dataset masked;
    std::vector<TruthCell> truth;  // row-major
};

// MCAR injection: masks round(rate * eligible) cells drawn uniformly without
// replacement. Eligible cells are the present cells outside the class
// column (or in every column when `exclude_class` is false). A draw that
// would leave its record without any present cell is skipped and another
// cell is drawn. Throws ParameterError when the count cannot be reached.
MaskedDataset inject_missing(const Dataset& complete, double rate, std::uint64_t seed, bool exclude_class = true);

struct Metrics {
    std::size_t categorical_cells = 0;
    std::size_t categorical_correct = 0;
    std::size_t rule_cells = 0;  // categorical cells imputed from rules
    std::size_t rule_correct = 0;
    std::size_t knn_cells = 0;
    std::size_t knn_correct = 0;
    std::size_t numeric_cells = 0;

    std::optional<double> accuracy;       // all categorical cells
    std::optional<double> rule_accuracy;  // rule-sourced categorical cells
    std::optional<double> knn_accuracy;   // kNN-sourced categorical cells
    std::optional<double> nrmse;          // mean over numeric attributes
};

// Scores imputed cells against ground truth. Categorical cells score by
// exact text match; numeric cells by RMSE over the attribute's true range.
// The per-source split needs the imputation report.
Metrics evaluate(const Dataset& imputed, std::span<const TruthCell> truth,
                 const ImputationReport* report = nullptr);

enum class SweepAxis { none, missing_rate, confidence, support };
enum class Method { hmit, knn };

std::string_view to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(std::string_view text);
std::string_view to_string(Method method);
Method method_from_string(std::string_view text);

struct ExperimentSpec {
    std::filesystem::path dataset_path;
    CsvOptions csv;
    double missing_rate = 0.20;
    std::uint64_t seed = 1;
    MiningParams mining;
    BinningOptions binning;
    KnnParams knn;
    SweepAxis axis = SweepAxis::none;
    std::vector<double> values;  // fractions
    std::vector<Method> methods{Method::hmit, Method::knn};
    bool exclude_class = true;           // class cells are never masked
    bool exclude_class_evidence = false; // class withheld from mining and distances
    std::size_t threads = 1;

    void validate() const;
};

struct BenchRow {
    Method method = Method::hmit;
    double x = 0.0;  // sweep value; the missing rate when the axis is none
    double missing_rate = 0.0;
    MiningParams mining;
    std::size_t k = 0;
    std::size_t masked_cells = 0;
    std::size_t imputed_cells = 0;
    std::size_t rule_count = 0;
    std::size_t by_rules = 0;
    double coverage = 0.0;
    Metrics metrics;
    std::optional<double> mine_seconds;  // hmit only
    double impute_seconds = 0.0;

    double total_seconds() const { return impute_seconds + mine_seconds.value_or(0.0); }
};

struct BenchReport {
    ExperimentSpec spec;
    std::vector<BenchRow> rows;  // sweep position major, then method order
};

BenchReport run_sweep(const Dataset& complete, const ExperimentSpec& spec);
BenchReport run_sweep(const ExperimentSpec& spec);  // loads spec.dataset_path

nlohmann::json to_json(const ExperimentSpec& spec);
nlohmann::json to_json(const BenchReport& report, bool include_timing = true);
std::string to_csv(const BenchReport& report, bool include_timing = true);

// Writes <prefix>.json, <prefix>.csv and one "x y" file per (method, metric)
// curve: <prefix>.<method>.<metric>.dat. Without timing the outputs are a
// pure function of the data and the spec. Returns the paths written.
std::vector<std::filesystem::path> write_bench_outputs(const BenchReport& report, const std::filesystem::path& prefix,
                                                       bool include_timing = true);

}  // namespace hmit
