#include "cli.hpp"

#include "hmit/bench.hpp"
#include "hmit/dataset.hpp"
#include "hmit/error.hpp"
#include "hmit/hmit_imputer.hpp"
#include "hmit/rule_set.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>

namespace hmit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

double parse_number(std::string text) {
    if (!text.empty() && text.back() == '%') text.pop_back();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v) || v < 0.0)
        throw UsageError("'" + text + "' is not a non-negative number");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

struct Options {
    std::string data;
    std::string marker = "?";
    std::string class_column;
    bool no_class = false;
    std::string support = "40";
    std::optional<std::size_t> support_count;
    std::string confidence = "60";
    std::optional<std::size_t> max_antecedent;
    std::size_t bins = 5;
    std::string binning = "equal-frequency";
    std::size_t k = 10;
    bool exclude_class_evidence = false;
    std::size_t threads = 1;

    // mine / impute
    std::string out;
    std::string rules;
    std::string report;
    std::string method = "hmit";

    // bench
    std::string sweep = "none";
    std::optional<std::string> values;
    std::string methods = "hmit,knn";
    std::uint64_t seed = 1;
    std::string missing_rate = "20";
    bool inject_class = false;
    bool no_timing = false;
};

void add_dataset_flags(CLI::App& cmd, Options& o) {
    cmd.add_option("--data", o.data, "Input CSV with a header row (relative paths also tried under $HMIT_DATA_DIR)")
        ->required();
    cmd.add_option("--marker", o.marker, "Missing-value marker")->capture_default_str();
    cmd.add_option("--class-column", o.class_column, "Class column name (default: last column)");
    cmd.add_flag("--no-class", o.no_class, "Treat every column as an ordinary attribute");
    cmd.add_flag("--exclude-class-evidence", o.exclude_class_evidence,
                 "Withhold the class column from mining and kNN distances");
}

void add_mining_flags(CLI::App& cmd, Options& o) {
    cmd.add_option("--support", o.support, "Minimum support, percent (40) or fraction (0.4)")->capture_default_str();
    cmd.add_option("--support-count", o.support_count, "Minimum support as an absolute record count");
    cmd.add_option("--confidence", o.confidence, "Minimum confidence, percent or fraction")->capture_default_str();
    cmd.add_option("--max-antecedent", o.max_antecedent, "Longest rule antecedent");
    cmd.add_option("--bins", o.bins, "Bins per numeric attribute")->capture_default_str();
    cmd.add_option("--binning", o.binning, "equal-frequency | equal-width")->capture_default_str();
}

void add_knn_flags(CLI::App& cmd, Options& o) {
    cmd.add_option("--k", o.k, "Nearest neighbours")->capture_default_str();
    cmd.add_option("--threads", o.threads, "Imputation worker threads")->capture_default_str();
}

fs::path resolve_data_path(const std::string& data) {
    fs::path p(data);
    if (fs::exists(p) || p.is_absolute()) return p;
    if (const char* dir = std::getenv("HMIT_DATA_DIR")) {
        fs::path candidate = fs::path(dir) / p;
        if (fs::exists(candidate)) return candidate;
    }
    return p;
}

MiningParams mining_params(const Options& o) {
    MiningParams p;
    p.min_support = parse_fraction(o.support);
    p.min_confidence = parse_fraction(o.confidence);
    p.min_support_count = o.support_count;
    p.max_antecedent_len = o.max_antecedent;
    try {
        p.validate();
    } catch (const ParameterError& e) {
        throw UsageError(e.what());
    }
    return p;
}

BinningOptions binning_options(const Options& o) {
    if (o.bins == 0) throw UsageError("--bins must be at least 1");
    try {
        return {o.bins, binning_strategy_from_string(o.binning)};
    } catch (const ParameterError& e) {
        throw UsageError(e.what());
    }
}

KnnParams knn_params(const Options& o) {
    if (o.k == 0) throw UsageError("--k must be at least 1");
    if (o.threads == 0) throw UsageError("--threads must be at least 1");
    return {o.k, DistanceMetric::heom};
}

Dataset load_dataset(const Options& o, CsvOptions& csv) {
    csv.missing_marker = o.marker;
    Dataset d = load_csv(resolve_data_path(o.data), csv);
    if (!o.no_class) {
        std::string name = o.class_column.empty() ? d.schema().back().name : o.class_column;
        d.set_class_column(name);
        csv.class_column = name;
    }
    return d;
}

std::vector<bool> excluded_attributes(const Options& o, const Dataset& d) {
    std::vector<bool> excluded(d.attribute_count(), false);
    if (o.exclude_class_evidence)
        if (auto c = d.class_index()) excluded[*c] = true;
    return excluded;
}

json common_config(const Options& o, const Dataset& d) {
    return {{"data", o.data},
            {"marker", o.marker},
            {"class_column", d.class_column() ? json(*d.class_column()) : json(nullptr)},
            {"exclude_class_evidence", o.exclude_class_evidence}};
}

void echo_config(std::ostream& err, const std::string& command, json config) {
    config["command"] = command;
    err << "config: " << config.dump() << '\n';
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    return out;
}

fs::path default_output(const std::string& data, const std::string& suffix) {
    return fs::path(data).stem().string() + suffix;
}

int cmd_mine(const Options& o, std::ostream& out, std::ostream& err) {
    const auto params = mining_params(o);
    const auto binning = binning_options(o);
    CsvOptions csv;
    Dataset d = load_dataset(o, csv);

    json config = common_config(o, d);
    config["mining"] = to_json(params);
    config["binning"] = to_json(binning);
    config["out"] = o.out.empty() ? json("-") : json(o.out);
    echo_config(err, "mine", config);

    const auto start = std::chrono::steady_clock::now();
    RuleSet rules = mine_rules(d, params, binning, excluded_attributes(o, d));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::ostream* summary = &out;
    if (o.out.empty()) {
        write_rules_jsonl(rules, out);
        summary = &err;
    } else {
        auto file = open_output(o.out);
        write_rules_jsonl(rules, file);
    }
    *summary << "records: " << d.record_count() << '\n'
             << "rules: " << rules.rules.size() << '\n'
             << "mining_seconds: " << format_number(seconds) << '\n';
    return exit_ok;
}

int cmd_impute(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.method != "hmit" && o.method != "knn") throw UsageError("--method must be hmit or knn");
    const auto knn = knn_params(o);
    std::optional<MiningParams> params;
    std::optional<BinningOptions> binning;
    if (o.method == "hmit" && o.rules.empty()) {
        params = mining_params(o);
        binning = binning_options(o);
    }
    CsvOptions csv;
    Dataset d = load_dataset(o, csv);

    const fs::path completed_path = o.out.empty() ? default_output(o.data, ".imputed.csv") : fs::path(o.out);
    const fs::path report_path = o.report.empty() ? default_output(o.data, ".report.json") : fs::path(o.report);

    json config = common_config(o, d);
    config["method"] = o.method;
    config["k"] = knn.k;
    config["threads"] = o.threads;
    if (params) config["mining"] = to_json(*params);
    if (binning) config["binning"] = to_json(*binning);
    if (!o.rules.empty()) config["rules"] = o.rules;
    config["out"] = completed_path.generic_string();
    config["report"] = report_path.generic_string();
    echo_config(err, "impute", config);

    ImputeParams impute{knn, o.threads, excluded_attributes(o, d)};
    ImputationResult result;
    if (o.method == "knn") {
        result = impute_dataset_knn(d, impute);
    } else {
        RuleSet rules;
        if (o.rules.empty()) {
            rules = mine_rules(d, *params, *binning, excluded_attributes(o, d));
        } else {
            std::ifstream in(o.rules, std::ios::binary);
            if (!in) throw DataError("cannot open '" + o.rules + "'");
            rules = read_rules_jsonl(in);
            bind_rules(rules, d);
        }
        result = impute_dataset(d, rules, impute);
    }

    write_csv(result.completed, completed_path, o.marker);
    json report = to_json(result.report, result.completed);
    report["config"] = config;
    auto file = open_output(report_path);
    file << report.dump(2) << '\n';

    out << "imputed: " << result.report.total() << '\n'
        << "by_rules: " << result.report.by_rules << '\n'
        << "by_knn: " << result.report.by_knn << '\n'
        << "completed: " << completed_path.generic_string() << '\n'
        << "report: " << report_path.generic_string() << '\n';
    return exit_ok;
}

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
    ExperimentSpec spec;
    spec.mining = mining_params(o);
    spec.binning = binning_options(o);
    spec.knn = knn_params(o);
    spec.threads = o.threads;
    spec.seed = o.seed;
    spec.missing_rate = parse_fraction(o.missing_rate);
    spec.exclude_class = !o.inject_class;
    spec.exclude_class_evidence = o.exclude_class_evidence;
    try {
        spec.axis = sweep_axis_from_string(o.sweep);
        spec.methods.clear();
        for (const auto& m : split(o.methods, ',')) spec.methods.push_back(method_from_string(m));
        if (o.values) spec.values = parse_values(*o.values);
        if (spec.axis != SweepAxis::none && !o.values) throw UsageError("--values is required with --sweep");
        spec.validate();
    } catch (const ParameterError& e) {
        throw UsageError(e.what());
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    Dataset d = load_dataset(o, spec.csv);
    spec.dataset_path = o.data;
    const fs::path prefix = o.out.empty() ? fs::path("bench") : fs::path(o.out);
    json config = to_json(spec);
    config["out"] = prefix.generic_string();
    config["timing"] = !o.no_timing;
    echo_config(err, "bench", config);

    BenchReport report = run_sweep(d, spec);
    for (const auto& p : write_bench_outputs(report, prefix, !o.no_timing)) out << "wrote: " << p.generic_string() << '\n';
    return exit_ok;
}

}  // namespace

double parse_fraction(const std::string& text) {
    const double v = parse_number(text);
    return v > 1.0 ? v / 100.0 : v;
}

std::vector<double> parse_values(const std::string& text) {
    if (text.empty()) throw UsageError("empty value list");
    std::vector<double> out;
    if (auto dots = text.find(".."); dots != std::string::npos) {
        std::string rest = text.substr(dots + 2);
        std::optional<double> step;
        if (auto colon = rest.find(':'); colon != std::string::npos) {
            step = parse_number(rest.substr(colon + 1));
            rest = rest.substr(0, colon);
        }
        const double first = parse_number(text.substr(0, dots));
        const double last = parse_number(rest);
        const double by = step.value_or(last > 1.0 ? 10.0 : 0.1);
        if (by <= 0.0 || last < first) throw UsageError("bad range '" + text + "'");
        const auto n = static_cast<std::size_t>(std::floor((last - first) / by + 1e-9));
        for (std::size_t i = 0; i <= n; ++i) {
            const double v = first + by * static_cast<double>(i);
            out.push_back(v > 1.0 ? v / 100.0 : v);
        }
        return out;
    }
    for (const auto& part : split(text, ',')) out.push_back(parse_fraction(part));
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hybrid association-rule / kNN missing-value imputation"};
    app.name("hmit");
    app.require_subcommand(1);
    Options o;

    auto* mine = app.add_subcommand("mine", "Mine association rules and write them as JSON lines");
    add_dataset_flags(*mine, o);
    add_mining_flags(*mine, o);
    mine->add_option("--out", o.out, "Rule file (default: standard output)");

    auto* impute = app.add_subcommand("impute", "Impute missing cells; writes the completed CSV and a JSON report");
    add_dataset_flags(*impute, o);
    add_mining_flags(*impute, o);
    add_knn_flags(*impute, o);
    impute->add_option("--rules", o.rules, "Pre-mined rule file (otherwise rules are mined from --data)");
    impute->add_option("--method", o.method, "hmit | knn")->capture_default_str();
    impute->add_option("--out", o.out, "Completed CSV (default: <data>.imputed.csv)");
    impute->add_option("--report", o.report, "Report JSON (default: <data>.report.json)");

    auto* bench = app.add_subcommand("bench", "Inject MCAR missing values and compare imputation methods");
    add_dataset_flags(*bench, o);
    add_mining_flags(*bench, o);
    add_knn_flags(*bench, o);
    bench->add_option("--sweep", o.sweep, "none | missing-rate | confidence | support")->capture_default_str();
    bench->add_option("--values", o.values, "Sweep values: 5,10,20 or 10..60 or 10..60:5");
    bench->add_option("--methods", o.methods, "Comma-separated subset of hmit,knn")->capture_default_str();
    bench->add_option("--seed", o.seed, "Seed for the missing-value mask")->capture_default_str();
    bench->add_option("--missing-rate", o.missing_rate, "Missing rate when not swept")->capture_default_str();
    bench->add_flag("--inject-class", o.inject_class, "Also mask cells of the class column");
    bench->add_option("--out", o.out, "Output prefix (default: bench)");
    bench->add_flag("--no-timing", o.no_timing, "Leave wall-clock timings out of the outputs");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage_error;
    }

    try {
        if (mine->parsed()) return cmd_mine(o, out, err);
        if (impute->parsed()) return cmd_impute(o, out, err);
        return cmd_bench(o, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime_error;
    }
}

}  // namespace hmit::cli
