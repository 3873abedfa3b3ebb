// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsr/metrics/metrics.hpp"

namespace rsr::metrics {

enum class Direction { Min, Max };

std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view text);

/// How per-trajectory values roll up to one dataset value.
enum class Aggregation {
    SurprisalWeighted,  ///< dataset_rsr (only for "rsr")
    SimpleMean,
};

struct MetricParams {
    ClipThreshold clip{};
    double filter_percent = kDefaultFilterPercent;
    PowerExponents power{};
};

/// A named trajectory-level metric with its preferred direction.
struct TrajectoryMetric {
    std::string name;
    Direction preferred = Direction::Min;
    Aggregation aggregation = Aggregation::SimpleMean;
    TrajectoryFn evaluate;
    ClipThreshold clip{};
};

/// Builds a metric by name. Known names: rsr, rsr_simple_mean, avg_surprisal,
/// avg_local_surprisal, avg_rank, avg_rank_clipped, avg_token_rsr,
/// filtered_avg_token_rsr, weighted_avg_token_rsr, rank_minus_surprisal,
/// rank_entropy_ratio, power_rsr, token_length, and external:<score-name>.
/// Throws std::invalid_argument for unknown names.
TrajectoryMetric make_metric(std::string_view name, const MetricParams& params = {});

std::vector<std::string> known_metric_names();

/// Dataset-level value under the metric's aggregation rule.
double dataset_score(std::span<const TrajectoryRecord> records, const TrajectoryMetric& metric);

/// Evaluates `metric` on every record with up to `threads` workers; values are
/// returned in record order. Failures are rethrown with the record key.
std::vector<double> evaluate_records(std::span<const TrajectoryRecord> records, const TrajectoryMetric& metric,
                                     unsigned threads = 1);

} // namespace rsr::metrics
