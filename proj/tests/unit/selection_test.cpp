// SPDX-License-Identifier: Apache-2.0
#include "rsr/select/selection.hpp"

#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "rsr/core/errors.hpp"
#include "rsr/metrics/metrics.hpp"

namespace rsr::select {
namespace {

std::vector<oracle::Cand> random_pool(std::mt19937_64& rng, std::size_t size) {
    std::uniform_int_distribution<int> value(0, 6);
    std::uniform_int_distribution<int> teacher(0, 10);
    std::uniform_int_distribution<int> label(0, 2);
    std::set<std::pair<std::string, std::int64_t>> used;
    std::vector<oracle::Cand> pool;
    while (pool.size() < size) {
        oracle::Cand c;
        c.teacher = "t" + std::to_string(teacher(rng));
        c.rollout = 1 + static_cast<std::int64_t>(used.size() % 3);
        if (!used.insert({c.teacher, c.rollout}).second) {
            continue;
        }
        c.value = 0.5 * value(rng);
        const int l = label(rng);
        if (l < 2) {
            c.correct = l == 1;
        }
        pool.push_back(c);
    }
    return pool;
}

std::vector<Candidate> as_candidates(const std::vector<oracle::Cand>& pool) {
    std::vector<Candidate> out;
    for (const auto& c : pool) {
        out.push_back({c.teacher, c.rollout, c.value, c.correct});
    }
    return out;
}

TEST(Choose, MatchesExhaustiveOracleIncludingTies) {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<std::size_t> size(1, 33);
    for (int trial = 0; trial < 3000; ++trial) {
        auto pool = random_pool(rng, size(rng));
        auto cands = as_candidates(pool);
        for (Direction d : {Direction::Min, Direction::Max}) {
            const bool minimize = d == Direction::Min;
            EXPECT_EQ(choose(cands, d, false), oracle::exhaustive_choice(pool, minimize));
            EXPECT_EQ(choose(cands, d, true), oracle::filtered_choice(pool, minimize));
        }
    }
}

TEST(Choose, TiesGoToSmallestTeacherThenRollout) {
    std::vector<Candidate> pool{{"b", 1, 2.0, {}}, {"a", 2, 2.0, {}}, {"a", 1, 2.0, {}}, {"c", 1, 3.0, {}}};
    EXPECT_EQ(choose(pool, Direction::Min), 2u);
    EXPECT_EQ(choose(pool, Direction::Max), 3u);
}

TEST(Choose, FilterFallsBackWhenNothingIsCorrect) {
    std::vector<Candidate> pool{{"a", 1, 5.0, false}, {"b", 1, 1.0, false}};
    EXPECT_EQ(choose(pool, Direction::Min, true), 1u);
    pool[0].correct = true;
    EXPECT_EQ(choose(pool, Direction::Min, true), 0u);
}

TEST(Choose, Errors) {
    EXPECT_THROW(choose(std::span<const Candidate>{}, Direction::Min), std::invalid_argument);
    std::vector<Candidate> nan{{"a", 1, std::nan(""), {}}};
    EXPECT_THROW(choose(nan, Direction::Min), std::invalid_argument);
}

std::vector<TrajectoryDataset> datasets_from(const std::vector<std::vector<oracle::Cand>>& pools) {
    std::map<std::string, TrajectoryDataset> by_teacher;
    for (std::size_t p = 0; p < pools.size(); ++p) {
        for (const auto& c : pools[p]) {
            TrajectoryDataset& ds = by_teacher[c.teacher];
            ds.dataset_id = c.teacher;
            auto r = testing::make_record({{1, 1.0}});
            r.problem_id = "q" + std::to_string(1000 + p);
            r.teacher_id = c.teacher;
            r.rollout_id = static_cast<int>(c.rollout);
            r.correct = c.correct;
            r.external_scores["v"] = c.value;
            ds.records.push_back(r);
        }
    }
    std::vector<TrajectoryDataset> out;
    for (auto& [t, ds] : by_teacher) {
        out.push_back(std::move(ds));
    }
    return out;
}

TEST(SelectTrajectories, ManifestMatchesOracleAndComposition) {
    std::mt19937_64 rng(32);
    std::uniform_int_distribution<std::size_t> size(1, 33);
    std::vector<std::vector<oracle::Cand>> pools;
    for (int p = 0; p < 300; ++p) {
        pools.push_back(random_pool(rng, size(rng)));
    }
    auto datasets = datasets_from(pools);
    auto built = build_pools(datasets);
    ASSERT_EQ(built.size(), pools.size());
    auto metric = metrics::make_metric("external:v");
    for (bool filtered : {false, true}) {
        for (Direction d : {Direction::Min, Direction::Max}) {
            auto m = filtered ? correctness_filtered_select(built, metric, d, 4) : select_trajectories(built, metric, d, 4);
            auto single = filtered ? correctness_filtered_select(built, metric, d, 1)
                                   : select_trajectories(built, metric, d, 1);
            ASSERT_EQ(m.choices.size(), pools.size());
            double percent = 0.0;
            std::size_t count = 0;
            for (std::size_t p = 0; p < pools.size(); ++p) {
                const auto& pool = pools[p];
                const std::size_t want = filtered ? oracle::filtered_choice(pool, d == Direction::Min)
                                                  : oracle::exhaustive_choice(pool, d == Direction::Min);
                EXPECT_EQ(m.choices[p].teacher_id, pool[want].teacher);
                EXPECT_EQ(m.choices[p].rollout_id, pool[want].rollout);
                EXPECT_EQ(m.choices[p].pool_size, pool.size());
                EXPECT_EQ(m.choices[p].teacher_id, single.choices[p].teacher_id);
            }
            for (const auto& share : m.composition) {
                percent += share.percent;
                count += share.count;
            }
            EXPECT_NEAR(percent, 100.0, 1e-9);
            EXPECT_EQ(count, pools.size());
            EXPECT_TRUE(std::is_sorted(m.composition.begin(), m.composition.end(),
                                       [](const auto& a, const auto& b) { return a.teacher_id < b.teacher_id; }));
        }
    }
}

TEST(SelectTrajectories, MetricFailureNamesPool) {
    TrajectoryDataset ds;
    auto r = testing::make_record({{1, 0.0}});
    r.problem_id = "bad";
    ds.records.push_back(r);
    std::vector<TrajectoryDataset> datasets{ds};
    auto pools = build_pools(datasets);
    try {
        select_trajectories(pools, metrics::make_metric("rsr"), Direction::Min);
        FAIL();
    } catch (const MetricError& e) {
        EXPECT_NE(std::string(e.what()).find("pool bad"), std::string::npos);
    }
}

TEST(SampleForTeacher, UniqueSortedAndDeterministic) {
    std::mt19937_64 rng(33);
    testing::TrajectoryShape shape;
    shape.max_len = 5;
    auto ds = testing::random_dataset(rng, 500, shape);
    auto a = sample_for_teacher(ds, 200, 7);
    auto b = sample_for_teacher(ds, 200, 7);
    EXPECT_EQ(a, b);
    ASSERT_EQ(a.records.size(), 200u);
    std::set<std::string> keys;
    std::vector<std::ptrdiff_t> positions;
    for (const auto& r : a.records) {
        EXPECT_TRUE(keys.insert(r.key()).second);
        positions.push_back(std::find(ds.records.begin(), ds.records.end(), r) - ds.records.begin());
    }
    EXPECT_TRUE(std::is_sorted(positions.begin(), positions.end()));
    EXPECT_NE(sample_for_teacher(ds, 200, 8), a);
    EXPECT_EQ(sample_for_teacher(ds, 500, 1).records, ds.records);
    EXPECT_THROW(sample_for_teacher(ds, 501, 1), std::invalid_argument);
}

TEST(SampleForTeacher, RoughlyUniform) {
    TrajectoryDataset ds;
    for (int i = 0; i < 10; ++i) {
        auto r = testing::make_record({{1, 1.0}});
        r.problem_id = "p" + std::to_string(i);
        ds.records.push_back(r);
    }
    std::map<std::string, int> hits;
    for (std::uint64_t seed = 0; seed < 5000; ++seed) {
        for (const auto& r : sample_for_teacher(ds, 3, seed).records) {
            ++hits[r.problem_id];
        }
    }
    for (const auto& [id, n] : hits) {
        EXPECT_NEAR(n, 1500, 150) << id;
    }
}

TEST(RankTeachers, MatchesSortOracle) {
    std::mt19937_64 rng(34);
    std::uniform_int_distribution<int> value(0, 8);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<TeacherScore> scores;
        for (int t = 0; t < 12; ++t) {
            scores.push_back({"t" + std::to_string(t), value(rng) * 0.25});
        }
        std::shuffle(scores.begin(), scores.end(), rng);
        for (Direction d : {Direction::Min, Direction::Max}) {
            auto ranked = rank_teachers(scores, d);
            auto expect = scores;
            std::sort(expect.begin(), expect.end(), [&](const auto& a, const auto& b) {
                const double sa = d == Direction::Min ? a.score : -a.score;
                const double sb = d == Direction::Min ? b.score : -b.score;
                return std::tie(sa, a.teacher_id) < std::tie(sb, b.teacher_id);
            });
            for (std::size_t i = 0; i < ranked.size(); ++i) {
                EXPECT_EQ(ranked[i].teacher_id, expect[i].teacher_id);
                EXPECT_EQ(ranked[i].position, i + 1);
                EXPECT_EQ(ranked[i].top1, i == 0);
                EXPECT_EQ(ranked[i].top2, i == 1);
            }
        }
    }
}

TEST(RankTeachers, PoolFromScoreTable) {
    std::vector<TeacherScore> pool{{"Deepseek-R1", 2.999},         {"Qwen-3-235B-Thinking", 3.030},
                                   {"Nemotron-Super", 3.066},      {"Qwen-3-30B-Thinking", 2.950},
                                   {"Magistral-Small", 3.067},     {"GPT-OSS-20B", 3.887}};
    auto ranked = rank_teachers(pool, Direction::Min);
    EXPECT_EQ(ranked[0].teacher_id, "Qwen-3-30B-Thinking");
    EXPECT_EQ(ranked[1].teacher_id, "Deepseek-R1");
    EXPECT_EQ(ranked.back().teacher_id, "GPT-OSS-20B");
}

TEST(ScoreTeachers, SampledScoresAreDeterministic) {
    std::mt19937_64 rng(35);
    testing::TrajectoryShape shape;
    shape.max_len = 50;
    std::vector<TrajectoryDataset> datasets;
    for (int t = 0; t < 3; ++t) {
        auto ds = testing::random_dataset(rng, 300, shape);
        ds.dataset_id = "teacher" + std::to_string(t);
        for (auto& r : ds.records) {
            r.teacher_id = ds.dataset_id;
        }
        datasets.push_back(ds);
    }
    auto metric = metrics::make_metric("rsr");
    auto a = score_teachers(datasets, metric, 200, 0, 1);
    auto b = score_teachers(datasets, metric, 200, 0, 3);
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].teacher_id, datasets[i].dataset_id);
        EXPECT_EQ(a[i].score, b[i].score);
    }
    auto full = score_teachers(datasets, metric, 0, 0, 1);
    EXPECT_EQ(full[0].score, metrics::dataset_rsr(datasets[0].records));
}

} // namespace
} // namespace rsr::select
