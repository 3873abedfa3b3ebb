// SPDX-License-Identifier: Apache-2.0
#include "rsr/metrics/metrics.hpp"

#include <random>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "rsr/core/errors.hpp"

namespace rsr::metrics {
namespace {

using testing::make_record;

TokenStat tok(std::int64_t rank, double s) {
    TokenStat t;
    t.rank = rank;
    t.surprisal = s;
    return t;
}

TEST(TokenRsr, HandValues) {
    EXPECT_DOUBLE_EQ(token_rsr(tok(1, 1.0)), 1.0);
    EXPECT_DOUBLE_EQ(token_rsr(tok(4, 2.0)), 2.0);
    EXPECT_DOUBLE_EQ(token_rsr(tok(12, 0.25)), 48.0);
}

TEST(TokenRsr, ZeroSurprisalIsUnbounded) {
    try {
        token_rsr(tok(3, 0.0));
        FAIL();
    } catch (const MetricError& e) {
        EXPECT_NE(std::string(e.what()).find("unbounded token ratio"), std::string::npos);
    }
}

TEST(ClipRank, Values) {
    EXPECT_EQ(clip_rank(3, ClipThreshold(100)), 3);
    EXPECT_EQ(clip_rank(100, ClipThreshold(100)), 100);
    EXPECT_EQ(clip_rank(2501, ClipThreshold(100)), 100);
    EXPECT_THROW(ClipThreshold(0), MetricError);
}

TEST(TrajectoryRsr, HandValues) {
    EXPECT_DOUBLE_EQ(trajectory_rsr(make_record({{1, 1.0}})), 1.0);
    EXPECT_DOUBLE_EQ(trajectory_rsr(make_record({{3, 0.5}, {250, 2.0}})), 41.2);
    EXPECT_DOUBLE_EQ(trajectory_rsr(make_record({{250, 2.0}, {3, 0.5}})), 41.2);
}

TEST(TrajectoryRsr, Errors) {
    EXPECT_THROW(trajectory_rsr(make_record({{1, 0.0}, {2, 0.0}})), MetricError);
    EXPECT_THROW(trajectory_rsr(make_record({})), MetricError);
    EXPECT_THROW(trajectory_rsr(make_record({{1, 1.0}}, 50), ClipThreshold(100)), MetricError);
}

TEST(TrajectoryRsr, SaturatedRanksClipWhenCapCoversThreshold) {
    auto r = make_record({{1000, 1.0}, {1, 1.0}}, 1000);
    r.tokens[0].rank_saturated = true;
    EXPECT_DOUBLE_EQ(trajectory_rsr(r), 50.5);
}

TEST(AvgSurprisal, Values) {
    EXPECT_DOUBLE_EQ(avg_surprisal(make_record({{1, 1.0}, {1, 3.0}})), 2.0);
    EXPECT_DOUBLE_EQ(avg_surprisal(make_record({{1, 0.0}, {1, 0.0}})), 0.0);
    std::mt19937_64 rng(11);
    testing::TrajectoryShape shape;
    shape.min_len = shape.max_len = 1000;
    auto r = testing::random_trajectory(rng, shape);
    EXPECT_LT(oracle::relative_error(avg_surprisal(r), oracle::mean_surprisal(r)), 1e-12);
}

TEST(AvgLocalSurprisal, ValuesAndMissingField) {
    auto r = make_record({{1, 1.0}, {1, 1.0}});
    r.tokens[0].local_surprisal = 0.5;
    r.tokens[1].local_surprisal = 1.5;
    EXPECT_DOUBLE_EQ(avg_local_surprisal(r), 1.0);

    auto same = make_record({{1, 0.3}, {2, 0.9}, {5, 2.0}});
    for (auto& t : same.tokens) {
        t.local_surprisal = t.surprisal;
    }
    EXPECT_EQ(avg_local_surprisal(same), avg_surprisal(same));

    auto missing = make_record({{1, 1.0}, {1, 1.0}, {1, 1.0}, {1, 1.0}});
    for (std::size_t k = 0; k < 4; ++k) {
        if (k != 3) {
            missing.tokens[k].local_surprisal = 1.0;
        }
    }
    try {
        avg_local_surprisal(missing);
        FAIL();
    } catch (const MetricError& e) {
        EXPECT_NE(std::string(e.what()).find("token 3"), std::string::npos);
    }
}

TEST(AvgRank, Values) {
    EXPECT_DOUBLE_EQ(avg_rank(make_record({{1, 1.0}, {1, 1.0}, {4, 1.0}})), 2.0);
    EXPECT_DOUBLE_EQ(avg_rank(make_record({{3, 1.0}, {250, 1.0}}), ClipThreshold(100)), 51.5);
}

TEST(AvgRank, UnclippedRefusesSaturated) {
    auto r = make_record({{1000, 1.0}, {2, 1.0}}, 1000);
    r.tokens[0].rank_saturated = true;
    EXPECT_THROW(avg_rank(r), MetricError);
    EXPECT_DOUBLE_EQ(avg_rank(r, ClipThreshold(100)), 51.0);
}

TEST(FilteredAvgTokenRsr, Values) {
    auto r = make_record({{2, 1.0}, {4, 2.0}});
    EXPECT_DOUBLE_EQ(filtered_avg_token_rsr(r, 100.0), 2.0);
    EXPECT_DOUBLE_EQ(filtered_avg_token_rsr(r, 50.0), 2.0);
    auto single = make_record({{7, 0.5}});
    for (double h : {0.1, 30.0, 100.0}) {
        EXPECT_DOUBLE_EQ(filtered_avg_token_rsr(single, h), token_rsr(single.tokens[0]));
    }
}

TEST(FilteredAvgTokenRsr, KeepsCeilOfShareAndEarlierOnTies) {
    // H=25 of 10 tokens keeps 3; of the four tied 5.0 tokens the earliest three win.
    auto r = make_record({{1, 1.0}, {10, 5.0}, {20, 5.0}, {30, 5.0}, {40, 5.0}, {1, 1.0}, {1, 1.0}, {1, 1.0},
                          {1, 1.0}, {1, 1.0}});
    EXPECT_DOUBLE_EQ(filtered_avg_token_rsr(r, 25.0), (2.0 + 4.0 + 6.0) / 3.0);
}

TEST(FilteredAvgTokenRsr, SkipsZeroSurprisalTokens) {
    auto r = make_record({{1, 0.0}, {3, 1.5}, {1, 0.0}, {1, 0.0}});
    EXPECT_DOUBLE_EQ(filtered_avg_token_rsr(r, 100.0), 2.0);
    EXPECT_THROW(filtered_avg_token_rsr(make_record({{1, 0.0}}), 50.0), MetricError);
    EXPECT_THROW(filtered_avg_token_rsr(r, 0.0), MetricError);
    EXPECT_THROW(filtered_avg_token_rsr(r, 101.0), MetricError);
}

TEST(WeightedAvgTokenRsr, Values) {
    EXPECT_DOUBLE_EQ(weighted_avg_token_rsr(make_record({{3, 0.5}, {250, 2.0}})), 41.2);
    auto uniform = make_record({{2, 0.5}, {6, 0.5}, {1, 0.5}});
    EXPECT_NEAR(weighted_avg_token_rsr(uniform), (4.0 + 12.0 + 2.0) / 3.0, 1e-12);
}

TEST(RankMinusSurprisal, Values) {
    EXPECT_DOUBLE_EQ(rank_minus_surprisal(make_record({{1, 1.0}})), 0.0);
    EXPECT_DOUBLE_EQ(rank_minus_surprisal(make_record({{3, 0.5}, {250, 2.0}})), 50.25);
}

TEST(RankEntropyRatio, Values) {
    auto r = make_record({{2, 1.0}, {2, 1.0}});
    r.tokens[0].entropy = 1.0;
    r.tokens[1].entropy = 1.0;
    EXPECT_DOUBLE_EQ(rank_entropy_ratio(r), 2.0);
    auto c = make_record({{3, 1.0}, {250, 1.0}});
    c.tokens[0].entropy = 0.5;
    c.tokens[1].entropy = 1.5;
    EXPECT_DOUBLE_EQ(rank_entropy_ratio(c), 51.5);
    EXPECT_THROW(rank_entropy_ratio(make_record({{1, 1.0}})), MetricError);
}

TEST(PowerRsr, Values) {
    auto r = make_record({{3, 0.5}, {250, 2.0}});
    EXPECT_EQ(power_rsr(r, {}, {1.0, 1.0}), trajectory_rsr(r));
    EXPECT_DOUBLE_EQ(power_rsr(make_record({{4, 1.0}}), {}, {2.0, 1.0}), 16.0);
    EXPECT_DOUBLE_EQ(power_rsr(make_record({{4, 4.0}}), {}, {1.0, 0.5}), 2.0);
}

TEST(DatasetRsr, Values) {
    auto r = make_record({{3, 0.5}, {250, 2.0}});
    std::vector<TrajectoryRecord> one{r};
    EXPECT_DOUBLE_EQ(dataset_rsr(one), trajectory_rsr(r));
    std::vector<TrajectoryRecord> two{r, r};
    EXPECT_DOUBLE_EQ(dataset_rsr(two), trajectory_rsr(r));
    EXPECT_THROW(dataset_rsr(std::span<const TrajectoryRecord>{}), MetricError);
}

TEST(DatasetRsr, DatasetCapChecked) {
    TrajectoryDataset ds;
    ds.k_ext = 50;
    ds.records.push_back(make_record({{1, 1.0}}, 50));
    EXPECT_THROW(dataset_rsr(ds), MetricError);
    EXPECT_NO_THROW(dataset_rsr(ds, ClipThreshold(50)));
}

TEST(DatasetRsr, AccumulatorMatchesBatch) {
    std::mt19937_64 rng(5);
    testing::TrajectoryShape shape;
    shape.max_len = 300;
    auto ds = testing::random_dataset(rng, 40, shape);
    DatasetRsrAccumulator acc;
    for (const auto& r : ds.records) {
        acc.add(r);
    }
    EXPECT_EQ(acc.count(), 40u);
    EXPECT_EQ(acc.value(), dataset_rsr(ds.records));
}

TEST(DatasetSimpleMean, Values) {
    auto a = make_record({{2, 1.0}});
    auto b = make_record({{4, 1.0}});
    std::vector<TrajectoryRecord> recs{a, b};
    EXPECT_DOUBLE_EQ(dataset_simple_mean(recs, [](const TrajectoryRecord& r) { return trajectory_rsr(r); }), 3.0);
    std::vector<TrajectoryRecord> same{a, a, a};
    EXPECT_DOUBLE_EQ(dataset_simple_mean(same, [](const TrajectoryRecord& r) { return trajectory_rsr(r); }), 2.0);

    std::mt19937_64 rng(9);
    testing::TrajectoryShape shape;
    shape.max_len = 200;
    auto ds = testing::random_dataset(rng, 50, shape);
    long double expected = 0;
    for (const auto& r : ds.records) {
        expected += oracle::trajectory_rsr(r, 100);
    }
    expected /= 50;
    double got = dataset_simple_mean(ds.records, [](const TrajectoryRecord& r) { return trajectory_rsr(r); });
    EXPECT_LT(oracle::relative_error(got, expected), 1e-12);
}

} // namespace
} // namespace rsr::metrics
