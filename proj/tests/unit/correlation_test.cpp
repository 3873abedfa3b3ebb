// SPDX-License-Identifier: Apache-2.0
#include "rsr/corr/correlation.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rsr/core/errors.hpp"

namespace rsr::corr {
namespace {

TEST(Spearman, HandValue) {
    std::vector<double> x{1, 2, 3, 4};
    std::vector<double> y{1, 3, 2, 4};
    EXPECT_NEAR(spearman(x, y), 0.8, 1e-15);
}

TEST(Pearson, OrthogonalAndPerfect) {
    std::vector<double> x{1, 0, -1, 0};
    std::vector<double> y{0, 1, 0, -1};
    EXPECT_NEAR(pearson(x, y), 0.0, 1e-15);
    std::vector<double> z{2, 4, 6, 8};
    std::vector<double> w{1, 2, 3, 4};
    EXPECT_DOUBLE_EQ(pearson(z, w), 1.0);
    std::vector<double> neg{-1, -2, -3, -4};
    EXPECT_DOUBLE_EQ(pearson(w, neg), -1.0);
}

TEST(Correlation, Guards) {
    std::vector<double> three{1, 2, 3};
    std::vector<double> two{1, 2};
    std::vector<double> flat{5, 5, 5};
    std::vector<double> inf{1, 2, std::numeric_limits<double>::infinity()};
    EXPECT_THROW(pearson(three, two), std::invalid_argument);
    EXPECT_THROW(pearson(two, two), std::invalid_argument);
    EXPECT_THROW(spearman(three, flat), std::invalid_argument);
    EXPECT_THROW(pearson(three, inf), std::invalid_argument);
}

TEST(Correlation, AffineInvariance) {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(12);
        std::vector<double> y(12);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = n(rng);
            y[i] = 0.5 * x[i] + n(rng);
        }
        std::vector<double> ax;
        for (double v : x) {
            ax.push_back(3.0 * v + 7.0);
        }
        EXPECT_NEAR(pearson(ax, y), pearson(x, y), 1e-12);
        EXPECT_EQ(spearman(ax, y), spearman(x, y));
    }
}

TEST(Correlation, MatchesOraclesWithTies) {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> level(0, 5);
    std::uniform_int_distribution<std::size_t> len(3, 40);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = len(rng);
        std::vector<double> x(n);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = level(rng);
            y[i] = level(rng) * 0.5;
        }
        if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; }) ||
            std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) {
            continue;
        }
        EXPECT_NEAR(spearman(x, y), static_cast<double>(oracle::spearman(x, y)), 1e-12);
        EXPECT_NEAR(pearson(x, y), static_cast<double>(oracle::pearson(x, y)), 1e-12);
        const auto ranks = average_ranks(x);
        const auto expect = oracle::count_ranks(x);
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_EQ(ranks[i], static_cast<double>(expect[i]));
        }
    }
}

TEST(AverageRanks, TieOrderSplitsTies) {
    std::vector<double> x{5.0, 3.0, 5.0, 1.0};
    EXPECT_EQ(average_ranks(x), (std::vector<double>{3.5, 2.0, 3.5, 1.0}));
    std::vector<std::int64_t> ties{0, 0, 1, 0};
    EXPECT_EQ(average_ranks(x, ties), (std::vector<double>{3.0, 2.0, 4.0, 1.0}));
    std::vector<std::int64_t> short_ties{0};
    EXPECT_THROW(average_ranks(x, short_ties), std::invalid_argument);
}

TEST(Performance, ReadAndDuplicates) {
    std::istringstream in("student,teacher,score,tie_order\ns,a,1.5,\ns,b,2.5,1\nq,a,3,0\n");
    auto perf = read_performance(in, "perf.csv");
    ASSERT_EQ(perf.size(), 2u);
    const auto* s = find_student(perf, "s");
    ASSERT_NE(s, nullptr);
    EXPECT_EQ(s->teachers(), (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(s->tie_orders(), (std::vector<std::int64_t>{0, 1}));
    EXPECT_EQ(find_student(perf, "missing"), nullptr);

    std::istringstream dup("student,teacher,score\ns,a,1\ns,a,2\n");
    try {
        read_performance(dup, "dup.csv");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_EQ(e.location(), "dup.csv:3");
    }
    std::istringstream header("a,b,c\n");
    EXPECT_THROW(read_performance(header, "h.csv"), InputError);
}

ScoreTable table_of(const std::string& student, const std::vector<std::pair<std::string, double>>& cells) {
    ScoreTable t(student);
    for (const auto& [teacher, v] : cells) {
        t.set(teacher, "m", v);
    }
    return t;
}

TEST(CorrelateTable, AggregatesAbsoluteMeanOfSignedValues) {
    std::vector<ScoreTable> tables{table_of("s1", {{"a", 1}, {"b", 2}, {"c", 3}}),
                                   table_of("s2", {{"a", 3}, {"b", 1}, {"c", 2}})};
    std::istringstream in("student,teacher,score\ns1,a,10\ns1,b,20\ns1,c,30\ns2,a,10\ns2,b,20\ns2,c,30\n");
    auto perf = read_performance(in, "p.csv");
    auto report = correlate_table(tables, perf);
    ASSERT_EQ(report.metrics, std::vector<std::string>{"m"});
    EXPECT_DOUBLE_EQ(report.cell(0, 0).spearman, 1.0);
    EXPECT_DOUBLE_EQ(report.cell(0, 1).spearman, -0.5);
    EXPECT_DOUBLE_EQ(report.aggregates[0].spearman, 0.25);
    EXPECT_EQ(report.cell(0, 0).n, 3u);
    EXPECT_EQ(report.metric_index("m"), 0u);
    EXPECT_EQ(report.student_index("s2"), 1u);
    EXPECT_THROW(report.metric_index("x"), std::out_of_range);

    auto csv = report_csv(report);
    EXPECT_NE(csv.find("m,average_abs,0.25,"), std::string::npos);
    auto text = report_text(report);
    EXPECT_NE(text.find("Spearman |rho|"), std::string::npos);
    EXPECT_NE(text.find("Pearson |r|"), std::string::npos);
}

TEST(CorrelateTable, MissingCellsAndStudents) {
    std::vector<ScoreTable> tables{table_of("s1", {{"a", 1}, {"b", 2}})};
    std::istringstream in("student,teacher,score\ns1,a,10\ns1,b,20\ns1,c,30\n");
    auto perf = read_performance(in, "p.csv");
    EXPECT_THROW(correlate_table(tables, perf), InputError);
    std::vector<ScoreTable> other{table_of("nobody", {{"a", 1}})};
    EXPECT_THROW(correlate_table(other, perf), InputError);
}

} // namespace
} // namespace rsr::corr
