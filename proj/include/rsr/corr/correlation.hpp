// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rsr/core/score_table.hpp"

namespace rsr::corr {

/// 1-based ascending ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> xs);

/// As above, but equal values are first ordered by `tie_order` (larger ranks
/// higher); only values equal in both share an averaged rank.
std::vector<double> average_ranks(std::span<const double> xs, std::span<const std::int64_t> tie_order);

/// Product-moment correlation. Throws std::invalid_argument on length
/// mismatch, fewer than 3 points, or a constant vector.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// Pearson correlation of average ranks. Same guards as pearson.
double spearman(std::span<const double> xs, std::span<const double> ys);

/// Spearman with explicit tie ordering for ys.
double spearman(std::span<const double> xs, std::span<const double> ys, std::span<const std::int64_t> ys_tie_order);

struct PerformanceEntry {
    std::string teacher;
    double score = 0.0;
    std::int64_t tie_order = 0;
};

struct StudentPerformance {
    std::string student;
    std::vector<PerformanceEntry> entries;  ///< file order

    std::vector<std::string> teachers() const;
    std::vector<double> scores() const;
    std::vector<std::int64_t> tie_orders() const;
};

using PerformanceTable = std::vector<StudentPerformance>;

/// Reads `student,teacher,score[,tie_order]`. Throws InputError with the line
/// on malformed rows or duplicate (student, teacher) pairs.
PerformanceTable read_performance(std::istream& in, const std::string& source_name);
const StudentPerformance* find_student(const PerformanceTable& perf, const std::string& student);

struct CorrelationCell {
    std::string student;
    std::string metric;
    double spearman = 0.0;
    double pearson = 0.0;
    std::size_t n = 0;
};

struct MetricAggregate {
    std::string metric;
    double spearman = 0.0;  ///< |mean over students of signed coefficients|
    double pearson = 0.0;
};

struct CorrelationReport {
    std::vector<std::string> students;
    std::vector<std::string> metrics;
    std::vector<CorrelationCell> cells;  ///< metric-major: cells[m * students.size() + s]
    std::vector<MetricAggregate> aggregates;

    const CorrelationCell& cell(std::size_t metric, std::size_t student) const {
        return cells[metric * students.size() + student];
    }
    std::size_t metric_index(const std::string& metric) const;
    std::size_t student_index(const std::string& student) const;
};

/// Correlates each requested metric (all metrics of the first table when empty)
/// with performance, per student, over the performance file's teacher set.
/// Throws InputError on missing students or cells.
CorrelationReport correlate_table(std::span<const ScoreTable> tables, const PerformanceTable& perf,
                                  std::span<const std::string> metrics = {}, unsigned threads = 1);

/// Long format: metric,student,spearman,pearson,n with one aggregate row per metric.
std::string report_csv(const CorrelationReport& report);
/// Absolute coefficients, metrics by rows, students plus "Average" by columns.
std::string report_text(const CorrelationReport& report);

} // namespace rsr::corr
