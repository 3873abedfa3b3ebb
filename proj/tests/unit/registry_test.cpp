// SPDX-License-Identifier: Apache-2.0
#include "rsr/metrics/registry.hpp"

#include <random>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "rsr/core/errors.hpp"

namespace rsr::metrics {
namespace {

TEST(Registry, EveryKnownNameBuilds) {
    for (const auto& name : known_metric_names()) {
        auto m = make_metric(name);
        EXPECT_EQ(m.name, name);
        EXPECT_TRUE(static_cast<bool>(m.evaluate)) << name;
    }
    EXPECT_EQ(make_metric("external:judge").name, "external:judge");
    EXPECT_THROW(make_metric("nonsense"), std::invalid_argument);
}

TEST(Registry, PreferredDirections) {
    EXPECT_EQ(make_metric("rsr").preferred, Direction::Min);
    EXPECT_EQ(make_metric("avg_surprisal").preferred, Direction::Min);
    EXPECT_EQ(make_metric("token_length").preferred, Direction::Max);
    EXPECT_EQ(make_metric("rsr").aggregation, Aggregation::SurprisalWeighted);
    EXPECT_EQ(make_metric("rsr_simple_mean").aggregation, Aggregation::SimpleMean);
}

TEST(Registry, DirectionText) {
    EXPECT_EQ(direction_from_string("min"), Direction::Min);
    EXPECT_EQ(direction_from_string("max"), Direction::Max);
    EXPECT_EQ(to_string(Direction::Max), "max");
    EXPECT_THROW(direction_from_string("up"), std::invalid_argument);
}

TEST(Registry, DatasetScoreUsesAggregation) {
    auto a = testing::make_record({{10, 1.0}});
    auto b = testing::make_record({{10, 4.0}, {10, 4.0}});
    std::vector<TrajectoryRecord> recs{a, b};
    // Weighted: (10 + 10) / (1 + 4); simple: (10 + 2.5) / 2.
    EXPECT_DOUBLE_EQ(dataset_score(recs, make_metric("rsr")), 4.0);
    EXPECT_DOUBLE_EQ(dataset_score(recs, make_metric("rsr_simple_mean")), 6.25);
    EXPECT_DOUBLE_EQ(dataset_score(recs, make_metric("token_length")), 1.5);
}

TEST(Registry, ParamsReachTheMetric) {
    auto r = testing::make_record({{50, 1.0}});
    MetricParams p;
    p.clip = ClipThreshold(10);
    EXPECT_DOUBLE_EQ(make_metric("rsr", p).evaluate(r), 10.0);
    p.power = {2.0, 1.0};
    EXPECT_DOUBLE_EQ(make_metric("power_rsr", p).evaluate(r), 100.0);
}

TEST(Registry, ExternalColumn) {
    auto r = testing::make_record({{1, 1.0}});
    r.external_scores["judge"] = 7.5;
    EXPECT_DOUBLE_EQ(make_metric("external:judge").evaluate(r), 7.5);
    EXPECT_THROW(make_metric("external:other").evaluate(r), MetricError);
}

TEST(Registry, EvaluateRecordsIsThreadIndependentAndNamesFailures) {
    std::mt19937_64 rng(1);
    testing::TrajectoryShape shape;
    shape.max_len = 100;
    auto ds = testing::random_dataset(rng, 64, shape);
    auto m = make_metric("rsr");
    EXPECT_EQ(evaluate_records(ds.records, m, 1), evaluate_records(ds.records, m, 8));

    ds.records[10].tokens.assign(1, TokenStat{});
    ds.records[10].tokens[0].surprisal = 0.0;
    try {
        evaluate_records(ds.records, m, 4);
        FAIL();
    } catch (const MetricError& e) {
        EXPECT_NE(std::string(e.what()).find(ds.records[10].key()), std::string::npos);
    }
}

} // namespace
} // namespace rsr::metrics
