// SPDX-License-Identifier: Apache-2.0
#include "rsr/metrics/registry.hpp"

#include <stdexcept>

#include "rsr/core/errors.hpp"
#include "rsr/core/parallel.hpp"

namespace rsr::metrics {

std::string_view to_string(Direction d) {
    return d == Direction::Min ? "min" : "max";
}

Direction direction_from_string(std::string_view text) {
    if (text == "min") {
        return Direction::Min;
    }
    if (text == "max") {
        return Direction::Max;
    }
    throw std::invalid_argument("direction must be 'min' or 'max' (got '" + std::string(text) + "')");
}

namespace {
TrajectoryMetric build_metric(std::string_view name, const MetricParams& p) {
    const std::string n(name);
    const ClipThreshold clip = p.clip;
    if (n == "rsr") {
        return {n, Direction::Min, Aggregation::SurprisalWeighted,
                [clip](const TrajectoryRecord& t) { return trajectory_rsr(t, clip); }};
    }
    if (n == "rsr_simple_mean") {
        return {n, Direction::Min, Aggregation::SimpleMean,
                [clip](const TrajectoryRecord& t) { return trajectory_rsr(t, clip); }};
    }
    if (n == "weighted_avg_token_rsr") {
        return {n, Direction::Min, Aggregation::SimpleMean,
                [clip](const TrajectoryRecord& t) { return weighted_avg_token_rsr(t, clip); }};
    }
    if (n == "avg_surprisal") {
        return {n, Direction::Min, Aggregation::SimpleMean, [](const TrajectoryRecord& t) { return avg_surprisal(t); }};
    }
    if (n == "avg_local_surprisal") {
        return {n, Direction::Min, Aggregation::SimpleMean,
                [](const TrajectoryRecord& t) { return avg_local_surprisal(t); }};
    }
    if (n == "avg_rank") {
        return {n, Direction::Min, Aggregation::SimpleMean, [](const TrajectoryRecord& t) { return avg_rank(t); }};
    }
    if (n == "avg_rank_clipped") {
        return {n, Direction::Min, Aggregation::SimpleMean,
                [clip](const TrajectoryRecord& t) { return avg_rank(t, clip); }};
    }
    if (n == "avg_token_rsr") {
        return {n, Direction::Min, Aggregation::SimpleMean, [](const TrajectoryRecord& t) { return avg_token_rsr(t); }};
    }
    if (n == "filtered_avg_token_rsr") {
        const double h = p.filter_percent;
        return {n, Direction::Min, Aggregation::SimpleMean,
                [clip, h](const TrajectoryRecord& t) { return filtered_avg_token_rsr(t, h, clip); }};
    }
    if (n == "rank_minus_surprisal") {
        return {n, Direction::Min, Aggregation::SimpleMean,
                [clip](const TrajectoryRecord& t) { return rank_minus_surprisal(t, clip); }};
    }
    if (n == "rank_entropy_ratio") {
        return {n, Direction::Min, Aggregation::SimpleMean,
                [clip](const TrajectoryRecord& t) { return rank_entropy_ratio(t, clip); }};
    }
    if (n == "power_rsr") {
        const PowerExponents e = p.power;
        return {n, Direction::Min, Aggregation::SimpleMean,
                [clip, e](const TrajectoryRecord& t) { return power_rsr(t, clip, e); }};
    }
    if (n == "token_length") {
        return {n, Direction::Max, Aggregation::SimpleMean,
                [](const TrajectoryRecord& t) { return static_cast<double>(t.tokens.size()); }};
    }
    constexpr std::string_view external = "external:";
    if (n.rfind(external, 0) == 0 && n.size() > external.size()) {
        std::string column = n.substr(external.size());
        return {n, Direction::Max, Aggregation::SimpleMean, [column](const TrajectoryRecord& t) {
                    auto it = t.external_scores.find(column);
                    if (it == t.external_scores.end()) {
                        throw MetricError("external score '" + column + "' missing on " + t.key());
                    }
                    return it->second;
                }};
    }
    throw std::invalid_argument("unknown metric '" + n + "'");
}
} // namespace

TrajectoryMetric make_metric(std::string_view name, const MetricParams& params) {
    TrajectoryMetric m = build_metric(name, params);
    m.clip = params.clip;
    return m;
}

std::vector<std::string> known_metric_names() {
    return {"rsr",
            "rsr_simple_mean",
            "weighted_avg_token_rsr",
            "avg_surprisal",
            "avg_local_surprisal",
            "avg_rank",
            "avg_rank_clipped",
            "avg_token_rsr",
            "filtered_avg_token_rsr",
            "rank_minus_surprisal",
            "rank_entropy_ratio",
            "power_rsr",
            "token_length",
            "external:<name>"};
}

double dataset_score(std::span<const TrajectoryRecord> records, const TrajectoryMetric& metric) {
    if (metric.aggregation == Aggregation::SurprisalWeighted) {
        return dataset_rsr(records, metric.clip);
    }
    return dataset_simple_mean(records, metric.evaluate);
}

std::vector<double> evaluate_records(std::span<const TrajectoryRecord> records, const TrajectoryMetric& metric,
                                     unsigned threads) {
    return parallel_map(records.size(), threads, [&](std::size_t i) {
        try {
            return metric.evaluate(records[i]);
        } catch (const MetricError& e) {
            throw MetricError(metric.name + " on " + records[i].key() + ": " + e.what());
        }
    });
}

} // namespace rsr::metrics
