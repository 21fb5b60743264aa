#include "doctest.h"
#include "test_util.hpp"

#include "hmit/bench.hpp"
#include "hmit/error.hpp"
#include "hmit/hmit_imputer.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

using namespace hmit;
using hmit::test::from_csv;

namespace {

AssociationRule make_rule(Itemset antecedent, Item consequent, std::size_t count, std::size_t antecedent_count) {
    return {std::move(antecedent), consequent, count, antecedent_count, 0.0,
            static_cast<double>(count) / static_cast<double>(antecedent_count)};
}

AttributeSchema color() { return {"color", AttributeKind::categorical, {"red", "blue", "green"}}; }

FiredSet all_of(const std::vector<AssociationRule>& rules, std::size_t attribute) {
    FiredSet f{attribute, {}};
    for (std::size_t i = 0; i < rules.size(); ++i) f.rules.push_back(i);
    return f;
}

// Checks that every imputed cell took the branch its fired set dictates and
// that the fired rules really apply.
void check_branch_soundness(const Dataset& d, const RuleSet& rules, const ImputationReport& report) {
    const auto encoder = rules.encoder();
    for (const auto& c : report.cells) {
        const Itemset known = encoder.known_items(d.record(c.row));
        bool any = false;
        for (const auto& r : rules.rules)
            any |= r.consequent.attribute == c.attribute && r.antecedent.is_subset_of(known);
        CHECK((c.source == ImputationSource::rules) == any);
        for (auto i : c.fired_rules) {
            CHECK(rules.rules[i].consequent.attribute == c.attribute);
            CHECK(rules.rules[i].antecedent.is_subset_of(known));
        }
    }
}

}  // namespace

TEST_CASE("fire_rules selects applicable rules strongest first") {
    std::vector<AssociationRule> rules{
        make_rule(Itemset{{{0, 0}}}, {1, 0}, 6, 10),          // a=x -> b
        make_rule(Itemset{{{0, 1}}}, {1, 1}, 9, 10),          // a=y -> b
        make_rule(Itemset{{{0, 0}, {2, 0}}}, {1, 1}, 9, 10),  // a=x,c=p -> b
        make_rule(Itemset{{{0, 0}}}, {2, 0}, 10, 10),         // other target
    };
    RuleIndex index(rules, 3);
    const Itemset known{{{0, 0}, {2, 0}}};
    FiredSet f = fire_rules(known, 1, index);
    CHECK(f.attribute == 1);
    CHECK(f.rules == std::vector<std::size_t>{2, 0});
    CHECK(fire_rules(Itemset{{{0, 2}}}, 1, index).empty());

    SUBCASE("an empty antecedent always fires") {
        rules.push_back(make_rule(Itemset{}, {1, 2}, 7, 10));
        RuleIndex with_empty(rules, 3);
        CHECK(fire_rules(Itemset{}, 1, with_empty).rules == std::vector<std::size_t>{4});
    }
}

TEST_CASE("impute_from_rules: categorical mode") {
    std::vector<AssociationRule> rules{
        make_rule(Itemset{{{1, 0}}}, {0, 0}, 6, 10),
        make_rule(Itemset{{{2, 0}}}, {0, 0}, 6, 10),
        make_rule(Itemset{{{3, 0}}}, {0, 1}, 9, 10),
    };
    CHECK(impute_from_rules(all_of(rules, 0), rules, color()).text == "red");
}

TEST_CASE("impute_from_rules: vote ties go to the most confident rule, in any order") {
    std::vector<AssociationRule> rules{
        make_rule(Itemset{{{1, 0}}}, {0, 1}, 7, 10),  // blue .7
        make_rule(Itemset{{{2, 0}}}, {0, 0}, 9, 10),  // red .9
    };
    std::vector<std::size_t> order{0, 1};
    do {
        FiredSet f{0, order};
        CHECK(impute_from_rules(f, rules, color()).text == "red");
    } while (std::next_permutation(order.begin(), order.end()));

    SUBCASE("then support") {
        std::vector<AssociationRule> same_conf{
            make_rule(Itemset{{{1, 0}}}, {0, 2}, 8, 10),  // green .8, support 8
            make_rule(Itemset{{{2, 0}}}, {0, 1}, 4, 5),   // blue  .8, support 4
        };
        CHECK(impute_from_rules(all_of(same_conf, 0), same_conf, color()).text == "green");
    }
    SUBCASE("then the lowest level") {
        std::vector<AssociationRule> identical{
            make_rule(Itemset{{{1, 0}}}, {0, 2}, 8, 10),
            make_rule(Itemset{{{2, 0}}}, {0, 1}, 8, 10),
        };
        CHECK(impute_from_rules(all_of(identical, 0), identical, color()).text == "blue");
    }
}

TEST_CASE("impute_from_rules: numeric median of representatives") {
    AttributeSchema x{"x", AttributeKind::numeric, {}};
    Bins bins{{0, 5, 10, 15}, {2.5, 7.5, 12.5}};
    std::vector<AssociationRule> two{
        make_rule(Itemset{{{1, 0}}}, {0, 0}, 6, 10),
        make_rule(Itemset{{{2, 0}}}, {0, 2}, 6, 10),
    };
    Value v = impute_from_rules(all_of(two, 0), two, x, &bins);
    CHECK(v.number == 7.5);
    CHECK(v.text == "7.5");

    auto three = two;
    three.push_back(make_rule(Itemset{{{3, 0}}}, {0, 2}, 6, 10));
    CHECK(impute_from_rules(all_of(three, 0), three, x, &bins).number == 12.5);
}

TEST_CASE("impute_from_rules: empty fired set is a logic error") {
    std::vector<AssociationRule> none;
    CHECK_THROWS_AS(impute_from_rules(FiredSet{0, {}}, none, color()), std::logic_error);
}

TEST_CASE("impute_cell takes the rule branch when a rule fires") {
    // a=x implies b=y in every complete record (confidence 3/4 counting the hole).
    Dataset d = from_csv("a,b,c\nx,y,p\nx,y,q\nx,y,p\nz,w,q\nz,w,p\nx,?,q\nz,?,q\n");
    RuleSet rules = mine_rules(d, {0.2, 0.7});
    CellImputation ruled = impute_cell(d.record(5), 1, rules, {3}, d);
    CHECK(ruled.source == ImputationSource::rules);
    CHECK(ruled.value.text == "y");
    CHECK_FALSE(ruled.fired_rules.empty());

    CHECK_THROWS_AS(impute_cell(d.record(0), 1, rules, {3}, d), ParameterError);

    SUBCASE("no rule fires: kNN") {
        RuleSet strict = mine_rules(d, {0.9, 0.9});
        CHECK(strict.rules.empty());
        CellImputation c = impute_cell(d.record(5), 1, strict, {1}, d);
        CHECK(c.source == ImputationSource::knn);
        CHECK(c.value == impute_knn(d.record(5), 1, d, {1}));
    }
}

TEST_CASE("impute on a constant attribute returns the constant") {
    Dataset d = from_csv("x,c\n5,a\n5,b\n5,a\n?,a\n");
    RuleSet rules = mine_rules(d, {0.2, 0.5});
    auto result = impute_dataset(d, rules);
    CHECK(result.completed.cell(3, 0)->number == 5.0);
    CHECK(result.completed.cell(3, 0)->text == "5");
    auto knn = impute_dataset_knn(d);
    CHECK(knn.completed.cell(3, 0)->number == 5.0);
}

TEST_CASE("impute_dataset with nothing missing is the identity") {
    Dataset d = from_csv("a,b\nx,1\ny,2\n");
    RuleSet rules = mine_rules(d, {0.1, 0.1});
    auto result = impute_dataset(d, rules);
    CHECK(result.report.total() == 0);
    CHECK(result.report.rule_coverage() == 0.0);
    CHECK(result.completed.records() == d.records());
}

TEST_CASE("impute_dataset rejects rules mined over another schema") {
    Dataset car = load_csv(test::data_path("car.csv"));
    Dataset other = from_csv("a,b\nx,1\n?,2\n");
    RuleSet rules = mine_rules(other, {0.1, 0.1});
    CHECK_THROWS_AS(impute_dataset(car, rules), DataError);

    Dataset reordered = from_csv("a,b\ny,1\nx,2\n");
    CHECK_THROWS_AS(impute_dataset(reordered, rules), DataError);  // levels need binding
}

TEST_CASE("property: totality and branch soundness on random data") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        Dataset d = test::random_categorical(rng, 30 + trial * 3, 5, 3, 0.15);
        const MiningParams params{0.05 + 0.02 * (trial % 5), 0.3 + 0.05 * (trial % 7)};
        RuleSet rules = mine_rules(d, params);
        auto result = impute_dataset(d, rules, {{3}});
        CHECK(result.completed.missing_count() == 0);
        CHECK(result.report.total() == d.missing_count());
        CHECK(result.report.by_rules + result.report.by_knn == result.report.total());
        check_branch_soundness(d, rules, result.report);
        // Observed cells are never touched.
        for (const auto& rec : d.records())
            for (std::size_t a = 0; a < rec.cells.size(); ++a)
                if (rec.cells[a]) CHECK(result.completed.cell(rec.id, a) == rec.cells[a]);
    }
}

TEST_CASE("property: rule-sourced values do not depend on record order") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        Dataset d = test::random_categorical(rng, 60, 4, 3, 0.15);
        std::vector<std::size_t> perm(d.record_count());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<Record> shuffled;
        for (std::size_t i = 0; i < perm.size(); ++i) shuffled.push_back({i, d.record(perm[i]).cells});
        Dataset p(d.schema(), shuffled);

        const MiningParams params{0.1, 0.5};
        RuleSet ra = mine_rules(d, params), rb = mine_rules(p, params);
        CHECK(ra.rules.size() == rb.rules.size());
        auto a = impute_dataset(d, ra).report;
        auto b = impute_dataset(p, rb).report;
        CHECK(a.by_rules == b.by_rules);
        for (const auto& cb : b.cells) {
            if (cb.source != ImputationSource::rules) continue;
            auto it = std::find_if(a.cells.begin(), a.cells.end(), [&](const CellImputation& ca) {
                return ca.row == perm[cb.row] && ca.attribute == cb.attribute;
            });
            REQUIRE(it != a.cells.end());
            CHECK(it->source == ImputationSource::rules);
            CHECK(it->value == cb.value);
        }
    }
}

TEST_CASE("property: rule coverage never grows with stricter thresholds") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        Dataset d = test::random_categorical(rng, 80, 5, 3, 0.1);
        double prev = 1.0;
        for (double s : {0.02, 0.05, 0.1, 0.2, 0.4}) {
            double cov = impute_dataset(d, mine_rules(d, {s, 0.4})).report.rule_coverage();
            CHECK(cov <= prev);
            prev = cov;
        }
        prev = 1.0;
        for (double c : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            double cov = impute_dataset(d, mine_rules(d, {0.05, c})).report.rule_coverage();
            CHECK(cov <= prev);
            prev = cov;
        }
    }
}

TEST_CASE("impute_dataset is independent of the thread count") {
    Dataset car = load_csv(test::data_path("car.csv"), {.class_column = "class"});
    auto masked = inject_missing(car, 0.1, 7).masked;
    RuleSet rules = mine_rules(masked, {0.1, 0.6});
    const auto one = to_json(impute_dataset(masked, rules, {{10}, 1}).report, masked);
    const auto three = to_json(impute_dataset(masked, rules, {{10}, 3}).report, masked);
    CHECK(one == three);
    const auto k1 = to_json(impute_dataset_knn(masked, {{10}, 1}).report, masked);
    const auto k4 = to_json(impute_dataset_knn(masked, {{10}, 4}).report, masked);
    CHECK(k1 == k4);
}

TEST_CASE("car at 20% missing is fully imputed") {
    Dataset car = load_csv(test::data_path("car.csv"), {.class_column = "class"});
    auto masked = inject_missing(car, 0.2, 1);
    RuleSet rules = mine_rules(masked.masked, {0.40, 0.60});
    auto result = impute_dataset(masked.masked, rules, {{10}});
    CHECK(result.completed.missing_count() == 0);
    CHECK(result.report.total() == masked.truth.size());
    check_branch_soundness(masked.masked, rules, result.report);
}
