// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rsr {

/// Extraction cap assumed when a manifest does not state one.
inline constexpr std::int64_t kDefaultExtractionCap = 1000;

/// Statistics of one response token under a student model. Surprisal is in nats.
/// When `rank_saturated` is set, the true rank exceeded the extraction cap and
/// `rank` holds the cap.
struct TokenStat {
    double surprisal = 0.0;
    std::int64_t rank = 1;
    bool rank_saturated = false;
    std::optional<double> local_surprisal;
    std::optional<double> entropy;

    friend bool operator==(const TokenStat&, const TokenStat&) = default;
};

/// One (problem, teacher, rollout) trajectory with its per-token statistics.
struct TrajectoryRecord {
    std::string problem_id;
    std::string teacher_id;
    int rollout_id = 1;
    std::int64_t k_ext = kDefaultExtractionCap;
    std::vector<TokenStat> tokens;
    std::optional<std::string> text;
    std::optional<bool> correct;
    std::map<std::string, double> external_scores;

    /// "problem/teacher/rollout", used in diagnostics and as the uniqueness key.
    std::string key() const {
        return problem_id + "/" + teacher_id + "/" + std::to_string(rollout_id);
    }

    friend bool operator==(const TrajectoryRecord&, const TrajectoryRecord&) = default;
};

/// Trajectories scored under one student, typically from a single teacher file.
struct TrajectoryDataset {
    std::string dataset_id;
    std::string student_id;
    std::int64_t k_ext = kDefaultExtractionCap;
    std::vector<TrajectoryRecord> records;

    friend bool operator==(const TrajectoryDataset&, const TrajectoryDataset&) = default;
};

} // namespace rsr
