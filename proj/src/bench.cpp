#include "hmit/bench.hpp"

#include "hmit/error.hpp"
#include "hmit/rule_set.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace hmit {

using nlohmann::json;

namespace {

// Unbiased draw in [0, n) from the raw 64-bit stream; the standard
// distributions are implementation-defined and would make masks
// platform-dependent.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t x = rng();
        if (x >= threshold) return x % n;
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

MaskedDataset inject_missing(const Dataset& complete, double rate, std::uint64_t seed, bool exclude_class) {
    if (!(rate >= 0.0 && rate < 1.0)) throw ParameterError("missing rate must be in [0, 1)");
    const auto class_index = exclude_class ? complete.class_index() : std::nullopt;

    std::vector<std::pair<std::size_t, std::size_t>> eligible;
    std::vector<std::size_t> present(complete.record_count());
    std::size_t capacity = 0;
    for (const auto& rec : complete.records()) {
        present[rec.id] = rec.present_count();
        std::size_t mine = 0;
        for (std::size_t a = 0; a < rec.cells.size(); ++a) {
            if (!rec.cells[a] || (class_index && a == *class_index)) continue;
            eligible.emplace_back(rec.id, a);
            ++mine;
        }
        capacity += std::min(mine, present[rec.id] > 0 ? present[rec.id] - 1 : 0);
    }

    const auto target = static_cast<std::size_t>(std::llround(rate * static_cast<double>(eligible.size())));
    if (target > capacity)
        throw ParameterError("cannot mask " + std::to_string(target) + " cells without emptying a record (at most " +
                             std::to_string(capacity) + ")");

    MaskedDataset out{complete, {}};
    std::mt19937_64 rng(seed);
    std::size_t chosen = 0;
    for (std::size_t i = 0; chosen < target; ++i) {
        const std::size_t j = i + uniform_below(rng, eligible.size() - i);
        std::swap(eligible[i], eligible[j]);
        const auto [row, a] = eligible[i];
        if (present[row] <= 1) continue;
        --present[row];
        ++chosen;
        out.truth.push_back({row, a, *complete.cell(row, a)});
        out.masked.set_cell(row, a, std::nullopt);
    }
    std::sort(out.truth.begin(), out.truth.end(), [](const TruthCell& x, const TruthCell& y) {
        return std::tie(x.row, x.attribute) < std::tie(y.row, y.attribute);
    });
    return out;
}

Metrics evaluate(const Dataset& imputed, std::span<const TruthCell> truth, const ImputationReport* report) {
    Metrics m;
    std::map<std::pair<std::size_t, std::size_t>, ImputationSource> source;
    if (report)
        for (const auto& c : report->cells) source.emplace(std::pair{c.row, c.attribute}, c.source);

    std::set<std::pair<std::size_t, std::size_t>> imputed_cells;
    for (const auto& t : truth) imputed_cells.emplace(t.row, t.attribute);
    if (report)
        for (const auto& c : report->cells) imputed_cells.emplace(c.row, c.attribute);

    struct NumericAcc {
        double sq = 0.0;
        std::size_t n = 0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
    };
    std::map<std::size_t, NumericAcc> numeric;

    for (const auto& t : truth) {
        const Cell& got = imputed.cell(t.row, t.attribute);
        if (!got) throw DataError("evaluate: masked cell was not imputed");
        if (imputed.attribute(t.attribute).is_numeric()) {
            auto& acc = numeric[t.attribute];
            const double err = got->number - t.value.number;
            acc.sq += err * err;
            ++acc.n;
            acc.lo = std::min(acc.lo, t.value.number);
            acc.hi = std::max(acc.hi, t.value.number);
            ++m.numeric_cells;
            continue;
        }
        const bool correct = got->text == t.value.text;
        ++m.categorical_cells;
        m.categorical_correct += correct;
        auto s = source.find({t.row, t.attribute});
        if (s == source.end()) continue;
        if (s->second == ImputationSource::rules) {
            ++m.rule_cells;
            m.rule_correct += correct;
        } else {
            ++m.knn_cells;
            m.knn_correct += correct;
        }
    }

    auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
        if (!den) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    m.accuracy = ratio(m.categorical_correct, m.categorical_cells);
    m.rule_accuracy = ratio(m.rule_correct, m.rule_cells);
    m.knn_accuracy = ratio(m.knn_correct, m.knn_cells);

    if (!numeric.empty()) {
        double sum = 0.0;
        for (auto& [a, acc] : numeric) {
            // the true range also covers cells that were never masked
            for (const auto& rec : imputed.records()) {
                if (!rec.cells[a] || imputed_cells.contains({rec.id, a})) continue;
                acc.lo = std::min(acc.lo, rec.cells[a]->number);
                acc.hi = std::max(acc.hi, rec.cells[a]->number);
            }
            const double range = acc.hi - acc.lo;
            const double rmse = std::sqrt(acc.sq / static_cast<double>(acc.n));
            sum += range > 0.0 ? rmse / range : rmse;
        }
        m.nrmse = sum / static_cast<double>(numeric.size());
    }
    return m;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::missing_rate: return "missing-rate";
        case SweepAxis::confidence: return "confidence";
        case SweepAxis::support: return "support";
        case SweepAxis::none: break;
    }
    return "none";
}

SweepAxis sweep_axis_from_string(std::string_view text) {
    if (text == "none") return SweepAxis::none;
    if (text == "missing-rate") return SweepAxis::missing_rate;
    if (text == "confidence") return SweepAxis::confidence;
    if (text == "support") return SweepAxis::support;
    throw ParameterError("unknown sweep axis '" + std::string(text) + "'");
}

std::string_view to_string(Method method) { return method == Method::hmit ? "hmit" : "knn"; }

Method method_from_string(std::string_view text) {
    if (text == "hmit") return Method::hmit;
    if (text == "knn") return Method::knn;
    throw ParameterError("unknown method '" + std::string(text) + "'");
}

void ExperimentSpec::validate() const {
    if (!(missing_rate >= 0.0 && missing_rate < 1.0)) throw ParameterError("missing rate must be in [0, 1)");
    mining.validate();
    knn.validate();
    if (binning.n_bins == 0) throw ParameterError("n_bins must be at least 1");
    if (methods.empty()) throw ParameterError("at least one method is required");
    for (std::size_t i = 0; i < methods.size(); ++i)
        for (std::size_t j = i + 1; j < methods.size(); ++j)
            if (methods[i] == methods[j]) throw ParameterError("duplicate method");
    if (axis != SweepAxis::none && values.empty()) throw ParameterError("sweep needs at least one value");
    for (double v : values) {
        if (axis == SweepAxis::missing_rate && !(v >= 0.0 && v < 1.0))
            throw ParameterError("missing-rate sweep values must be in [0, 1)");
        if ((axis == SweepAxis::confidence || axis == SweepAxis::support) && !(v > 0.0 && v <= 1.0))
            throw ParameterError("threshold sweep values must be in (0, 1]");
    }
}

BenchReport run_sweep(const Dataset& complete, const ExperimentSpec& spec) {
    spec.validate();
    BenchReport report{spec, {}};

    std::vector<double> points = spec.values;
    if (spec.axis == SweepAxis::none) points = {spec.missing_rate};

    std::vector<bool> excluded(complete.attribute_count(), false);
    if (spec.exclude_class_evidence)
        if (auto c = complete.class_index()) excluded[*c] = true;

    for (double x : points) {
        double rate = spec.missing_rate;
        MiningParams mining = spec.mining;
        switch (spec.axis) {
            case SweepAxis::missing_rate: rate = x; break;
            case SweepAxis::confidence: mining.min_confidence = x; break;
            case SweepAxis::support:
                mining.min_support = x;
                mining.min_support_count.reset();
                break;
            case SweepAxis::none: break;
        }

        // Same seed and rate => same mask, so threshold sweeps share one mask.
        MaskedDataset masked = [&] {
            try {
                return inject_missing(complete, rate, spec.seed, spec.exclude_class);
            } catch (const std::exception& e) {
                throw ParameterError("sweep point " + format_number(x) + ": " + e.what());
            }
        }();

        ImputeParams params{spec.knn, spec.threads, excluded};
        for (Method method : spec.methods) {
            BenchRow row;
            row.method = method;
            row.x = x;
            row.missing_rate = rate;
            row.mining = mining;
            row.k = spec.knn.k;
            row.masked_cells = masked.truth.size();

            ImputationResult result;
            if (method == Method::hmit) {
                auto start = std::chrono::steady_clock::now();
                RuleSet rules = mine_rules(masked.masked, mining, spec.binning, excluded);
                row.mine_seconds = seconds_since(start);
                row.rule_count = rules.rules.size();
                start = std::chrono::steady_clock::now();
                result = impute_dataset(masked.masked, rules, params);
                row.impute_seconds = seconds_since(start);
            } else {
                auto start = std::chrono::steady_clock::now();
                result = impute_dataset_knn(masked.masked, params);
                row.impute_seconds = seconds_since(start);
            }
            row.imputed_cells = result.report.total();
            row.by_rules = result.report.by_rules;
            row.coverage = result.report.rule_coverage();
            row.metrics = evaluate(result.completed, masked.truth, &result.report);
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

BenchReport run_sweep(const ExperimentSpec& spec) {
    return run_sweep(load_csv(spec.dataset_path, spec.csv), spec);
}

// ---------------------------------------------------------------------------

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const ExperimentSpec& spec) {
    json methods = json::array();
    for (Method m : spec.methods) methods.push_back(std::string(to_string(m)));
    return {{"dataset", spec.dataset_path.generic_string()},
            {"missing_marker", spec.csv.missing_marker},
            {"class_column", spec.csv.class_column ? json(*spec.csv.class_column) : json(nullptr)},
            {"missing_rate", spec.missing_rate},
            {"seed", spec.seed},
            {"mining", to_json(spec.mining)},
            {"binning", to_json(spec.binning)},
            {"k", spec.knn.k},
            {"distance", "heom"},
            {"sweep", {{"axis", std::string(to_string(spec.axis))}, {"values", spec.values}}},
            {"methods", std::move(methods)},
            {"exclude_class", spec.exclude_class},
            {"exclude_class_evidence", spec.exclude_class_evidence}};
}

json to_json(const BenchReport& report, bool include_timing) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        json row = {{"method", std::string(to_string(r.method))},
                    {"x", r.x},
                    {"missing_rate", r.missing_rate},
                    {"mining", to_json(r.mining)},
                    {"k", r.k},
                    {"masked_cells", r.masked_cells},
                    {"imputed_cells", r.imputed_cells},
                    {"rule_count", r.rule_count},
                    {"by_rules", r.by_rules},
                    {"coverage", r.coverage},
                    {"accuracy", optional_number(r.metrics.accuracy)},
                    {"rule_accuracy", optional_number(r.metrics.rule_accuracy)},
                    {"knn_accuracy", optional_number(r.metrics.knn_accuracy)},
                    {"nrmse", optional_number(r.metrics.nrmse)},
                    {"categorical_cells", r.metrics.categorical_cells},
                    {"numeric_cells", r.metrics.numeric_cells}};
        if (include_timing) {
            row["mine_seconds"] = optional_number(r.mine_seconds);
            row["impute_seconds"] = r.impute_seconds;
            row["total_seconds"] = r.total_seconds();
        }
        rows.push_back(std::move(row));
    }
    return {{"spec", to_json(report.spec)}, {"rows", std::move(rows)}};
}

std::string to_csv(const BenchReport& report, bool include_timing) {
    std::ostringstream out;
    out << "method,axis,x,missing_rate,min_support,min_support_count,min_confidence,k,masked_cells,"
           "imputed_cells,rule_count,by_rules,coverage,accuracy,rule_accuracy,knn_accuracy,nrmse,"
           "categorical_cells,numeric_cells";
    if (include_timing) out << ",mine_seconds,impute_seconds,total_seconds";
    out << '\n';
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    for (const auto& r : report.rows) {
        out << to_string(r.method) << ',' << to_string(report.spec.axis) << ',' << format_number(r.x) << ','
            << format_number(r.missing_rate) << ',' << format_number(r.mining.min_support) << ','
            << (r.mining.min_support_count ? std::to_string(*r.mining.min_support_count) : std::string()) << ','
            << format_number(r.mining.min_confidence) << ',' << r.k << ',' << r.masked_cells << ','
            << r.imputed_cells << ',' << r.rule_count << ',' << r.by_rules << ',' << format_number(r.coverage)
            << ',' << opt(r.metrics.accuracy) << ',' << opt(r.metrics.rule_accuracy) << ','
            << opt(r.metrics.knn_accuracy) << ',' << opt(r.metrics.nrmse) << ',' << r.metrics.categorical_cells
            << ',' << r.metrics.numeric_cells;
        if (include_timing)
            out << ',' << opt(r.mine_seconds) << ',' << format_number(r.impute_seconds) << ','
                << format_number(r.total_seconds());
        out << '\n';
    }
    return out.str();
}

std::vector<std::filesystem::path> write_bench_outputs(const BenchReport& report,
                                                       const std::filesystem::path& prefix, bool include_timing) {
    std::vector<std::filesystem::path> written;
    auto write = [&](const std::filesystem::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot write '" + path.string() + "'");
        out << text;
        if (!out) throw DataError("write failed for '" + path.string() + "'");
        written.push_back(path);
    };
    auto with_suffix = [&](const std::string& suffix) {
        auto p = prefix;
        p += suffix;
        return p;
    };

    write(with_suffix(".json"), to_json(report, include_timing).dump(2) + "\n");
    write(with_suffix(".csv"), to_csv(report, include_timing));

    using Getter = std::optional<double> (*)(const BenchRow&);
    const std::pair<const char*, Getter> curves[] = {
        {"accuracy", [](const BenchRow& r) { return r.metrics.accuracy; }},
        {"rule_accuracy", [](const BenchRow& r) { return r.metrics.rule_accuracy; }},
        {"nrmse", [](const BenchRow& r) { return r.metrics.nrmse; }},
        {"coverage", [](const BenchRow& r) -> std::optional<double> { return r.coverage; }},
        {"impute_seconds", [](const BenchRow& r) -> std::optional<double> { return r.impute_seconds; }},
        {"total_seconds", [](const BenchRow& r) -> std::optional<double> { return r.total_seconds(); }},
    };
    for (Method method : report.spec.methods) {
        for (const auto& [metric, get] : curves) {
            if (!include_timing && std::string_view(metric).ends_with("_seconds")) continue;
            std::ostringstream data;
            bool any = false;
            data << "# x " << metric << '\n';
            for (const auto& r : report.rows) {
                if (r.method != method) continue;
                if (auto y = get(r)) {
                    data << format_number(r.x) << ' ' << format_number(*y) << '\n';
                    any = true;
                }
            }
            if (any) write(with_suffix("." + std::string(to_string(method)) + "." + metric + ".dat"), data.str());
        }
    }
    return written;
}

}  // namespace hmit
