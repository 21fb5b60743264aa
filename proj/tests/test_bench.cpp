#include "doctest.h"
#include "test_util.hpp"

#include "hmit/bench.hpp"
#include "hmit/error.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace hmit;
using hmit::test::from_csv;

namespace {

const Dataset& car() {
    static const Dataset d = load_csv(test::data_path("car.csv"), {.class_column = "class"});
    return d;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("inject_missing: rate 0 is the identity") {
    auto m = inject_missing(car(), 0.0, 1);
    CHECK(m.truth.empty());
    CHECK(m.masked.records() == car().records());
}

TEST_CASE("inject_missing: count, class column and ground truth") {
    auto m = inject_missing(car(), 0.2, 1);
    CHECK(m.truth.size() == 2074);  // round(0.2 * 1728 * 6)
    CHECK(m.masked.missing_count() == 2074);
    CHECK(m.masked.missing_count(*car().class_index()) == 0);
    for (const auto& t : m.truth) {
        CHECK_FALSE(m.masked.cell(t.row, t.attribute).has_value());
        CHECK(*car().cell(t.row, t.attribute) == t.value);
    }
    for (const auto& rec : m.masked.records()) CHECK(rec.present_count() > 0);

    auto with_class = inject_missing(car(), 0.2, 1, false);
    CHECK(with_class.truth.size() == 2419);  // round(0.2 * 1728 * 7)
}

TEST_CASE("inject_missing: deterministic per seed") {
    auto a = inject_missing(car(), 0.15, 42);
    auto b = inject_missing(car(), 0.15, 42);
    auto c = inject_missing(car(), 0.15, 43);
    CHECK(a.masked.records() == b.masked.records());
    CHECK(a.masked.records() != c.masked.records());
}

TEST_CASE("inject_missing: never empties a record") {
    Dataset d = from_csv("a,b\nx,1\ny,2\nz,3\n");
    std::mt19937_64 rng(1);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto m = inject_missing(d, 0.5, seed, false);
        CHECK(m.truth.size() == 3);
        for (const auto& rec : m.masked.records()) CHECK(rec.present_count() == 1);
    }
}

TEST_CASE("inject_missing: errors") {
    Dataset d = from_csv("a,b\nx,1\ny,2\n");
    CHECK_THROWS_AS(inject_missing(d, 0.9, 1, false), ParameterError);
    CHECK_THROWS_AS(inject_missing(d, 1.0, 1), ParameterError);
    CHECK_THROWS_AS(inject_missing(d, -0.1, 1), ParameterError);
}

TEST_CASE("evaluate: worked examples") {
    Dataset truth = from_csv("c,x\nred,0\nblue,5\nred,10\ngreen,10\n");

    SUBCASE("perfect imputation") {
        std::vector<TruthCell> cells;
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t a = 0; a < 2; ++a) cells.push_back({r, a, *truth.cell(r, a)});
        Metrics m = evaluate(truth, cells);
        CHECK(*m.accuracy == 1.0);
        CHECK(*m.nrmse == 0.0);
        CHECK_FALSE(m.rule_accuracy.has_value());
    }
    SUBCASE("three of four categorical cells right") {
        Dataset got = truth;
        got.set_cell(3, 0, categorical_value(got.attribute(0), 0));
        std::vector<TruthCell> cells;
        for (std::size_t r = 0; r < 4; ++r) cells.push_back({r, 0, *truth.cell(r, 0)});
        Metrics m = evaluate(got, cells);
        CHECK(*m.accuracy == 0.75);
        CHECK_FALSE(m.nrmse.has_value());
    }
    SUBCASE("nrmse divides by the true range") {
        // errors 5 and 0 over range 10: sqrt((25 + 0) / 2) / 10
        Dataset got = truth;
        got.set_cell(0, 1, numeric_value(5));
        std::vector<TruthCell> cells{{0, 1, *truth.cell(0, 1)}, {2, 1, *truth.cell(2, 1)}};
        Metrics m = evaluate(got, cells);
        CHECK(*m.nrmse == doctest::Approx(std::sqrt(12.5) / 10.0));
        CHECK(*m.nrmse == doctest::Approx(0.35355).epsilon(1e-4));
    }
    SUBCASE("per-source split") {
        Dataset got = truth;
        got.set_cell(1, 0, categorical_value(got.attribute(0), 0));  // wrong
        ImputationReport report;
        report.cells.push_back({0, 0, *truth.cell(0, 0), ImputationSource::rules, {}, {}, false});
        report.cells.push_back({1, 0, *got.cell(1, 0), ImputationSource::knn, {}, {}, false});
        std::vector<TruthCell> cells{{0, 0, *truth.cell(0, 0)}, {1, 0, *truth.cell(1, 0)}};
        Metrics m = evaluate(got, cells, &report);
        CHECK(*m.rule_accuracy == 1.0);
        CHECK(*m.knn_accuracy == 0.0);
        CHECK(*m.accuracy == 0.5);
    }
}

TEST_CASE("run_sweep: rows per point and method") {
    ExperimentSpec spec;
    spec.axis = SweepAxis::missing_rate;
    spec.values = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
    spec.mining = {0.1, 0.6};
    spec.knn.k = 5;
    auto report = run_sweep(car(), spec);
    REQUIRE(report.rows.size() == 12);
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& r = report.rows[i];
        CHECK(r.method == (i % 2 ? Method::knn : Method::hmit));
        CHECK(r.x == spec.values[i / 2]);
        CHECK(r.imputed_cells == r.masked_cells);
        CHECK(r.metrics.accuracy.has_value());
        CHECK(r.mine_seconds.has_value() == (r.method == Method::hmit));
        if (r.method == Method::knn) CHECK(r.coverage == 0.0);
    }
}

TEST_CASE("run_sweep: zero coverage makes hmit coincide with knn") {
    ExperimentSpec spec;
    spec.mining = {1.0, 1.0};
    auto report = run_sweep(car(), spec);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].rule_count == 0);
    CHECK(report.rows[0].coverage == 0.0);
    CHECK(*report.rows[0].metrics.accuracy == *report.rows[1].metrics.accuracy);

    spec.methods = {Method::knn};
    auto single = run_sweep(car(), spec);
    REQUIRE(single.rows.size() == 1);
    CHECK_FALSE(single.rows[0].mine_seconds.has_value());
}

TEST_CASE("run_sweep: threshold sweeps share one mask") {
    ExperimentSpec spec;
    spec.axis = SweepAxis::support;
    spec.values = {0.1, 0.3};
    spec.methods = {Method::hmit};
    spec.mining.min_support_count = 40;  // overridden by the sweep
    auto report = run_sweep(car(), spec);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].masked_cells == report.rows[1].masked_cells);
    CHECK_FALSE(report.rows[0].mining.min_support_count.has_value());
    CHECK(report.rows[0].coverage >= report.rows[1].coverage);
}

TEST_CASE("run_sweep: invalid specs") {
    ExperimentSpec spec;
    spec.axis = SweepAxis::confidence;
    CHECK_THROWS_AS(run_sweep(car(), spec), ParameterError);
    spec.values = {1.5};
    CHECK_THROWS_AS(run_sweep(car(), spec), ParameterError);
    spec.values = {0.5};
    spec.methods = {};
    CHECK_THROWS_AS(run_sweep(car(), spec), ParameterError);
}

TEST_CASE("bench outputs are deterministic apart from timing") {
    ExperimentSpec spec;
    spec.axis = SweepAxis::confidence;
    spec.values = {0.6, 0.8};
    spec.mining = {0.1, 0.6};
    auto a = run_sweep(car(), spec);
    auto b = run_sweep(car(), spec);
    CHECK(to_json(a, false).dump() == to_json(b, false).dump());
    CHECK(to_csv(a, false) == to_csv(b, false));
    CHECK(to_json(a).at("rows").at(0).contains("impute_seconds"));
    CHECK_FALSE(to_json(a, false).at("rows").at(0).contains("impute_seconds"));

    const auto dir = std::filesystem::temp_directory_path() / "hmit_bench_test";
    std::filesystem::create_directories(dir);
    auto written = write_bench_outputs(a, dir / "run");
    CHECK(std::filesystem::exists(dir / "run.json"));
    CHECK(std::filesystem::exists(dir / "run.csv"));
    CHECK(std::filesystem::exists(dir / "run.hmit.accuracy.dat"));
    CHECK(std::filesystem::exists(dir / "run.knn.accuracy.dat"));
    CHECK_FALSE(std::filesystem::exists(dir / "run.knn.nrmse.dat"));  // car has no numeric attributes
    CHECK(slurp(dir / "run.hmit.coverage.dat").starts_with("# x coverage\n0.6 "));
    const auto csv = slurp(dir / "run.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    std::filesystem::remove_all(dir);
}

TEST_CASE("run_sweep on a mixed dataset reports nrmse") {
    Dataset crx = load_csv(test::data_path("crx.csv"));
    // drop incomplete records so the ground truth is fully known
    std::vector<Record> complete;
    for (const auto& r : crx.records())
        if (r.present_count() == crx.attribute_count()) complete.push_back({complete.size(), r.cells});
    Dataset d(crx.schema(), complete, crx.attribute(crx.attribute_count() - 1).name);
    ExperimentSpec spec;
    spec.mining = {0.2, 0.6};
    auto report = run_sweep(d, spec);
    REQUIRE(report.rows.size() == 2);
    for (const auto& r : report.rows) {
        REQUIRE(r.metrics.nrmse.has_value());
        CHECK(*r.metrics.nrmse >= 0.0);
        CHECK(*r.metrics.nrmse < 1.0);
    }
}
