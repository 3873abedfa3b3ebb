// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rsr/core/types.hpp"
#include "rsr/metrics/registry.hpp"

namespace rsr::select {

using metrics::Direction;

struct CandidatePool {
    std::string problem_id;
    std::vector<const TrajectoryRecord*> candidates;
};

/// Groups records from every dataset by problem_id. Pools come out in
/// problem_id order; candidates keep input order.
std::vector<CandidatePool> build_pools(std::span<const TrajectoryDataset> datasets);

/// One scored candidate, as seen by the chooser.
struct Candidate {
    std::string teacher_id;
    std::int64_t rollout_id = 0;
    double value = 0.0;
    std::optional<bool> correct;
};

/// Index of the candidate extremizing `value` in `direction`; equal values go
/// to the smallest (teacher_id, rollout_id). When `correct_only` is set and
/// any candidate is labeled correct, only correct candidates compete.
/// Throws std::invalid_argument on an empty pool or a NaN value.
std::size_t choose(std::span<const Candidate> pool, Direction direction, bool correct_only = false);

struct Choice {
    std::string problem_id;
    std::string teacher_id;
    std::int64_t rollout_id = 0;
    double value = 0.0;
    std::size_t pool_size = 0;
    bool filtered = false;  ///< the correctness filter restricted this pool
};

struct TeacherShare {
    std::string teacher_id;
    std::size_t count = 0;
    double percent = 0.0;
    double mean_value = 0.0;  ///< mean metric value of this teacher's chosen trajectories
};

struct SelectionManifest {
    std::string metric;
    Direction direction = Direction::Min;
    bool correctness_filtered = false;
    std::vector<Choice> choices;  ///< one per pool, problem_id order
    std::vector<TeacherShare> composition;  ///< teachers with >= 1 pick, by teacher_id
};

SelectionManifest select_trajectories(std::span<const CandidatePool> pools, const metrics::TrajectoryMetric& metric,
                                      Direction direction, unsigned threads = 1);

SelectionManifest correctness_filtered_select(std::span<const CandidatePool> pools,
                                              const metrics::TrajectoryMetric& metric, Direction direction,
                                              unsigned threads = 1);

/// Uniform sample of n records without replacement; kept records stay in
/// their original order. Throws std::invalid_argument when n exceeds the size.
TrajectoryDataset sample_for_teacher(const TrajectoryDataset& ds, std::size_t n, std::uint64_t seed);

struct TeacherScore {
    std::string teacher_id;
    double score = 0.0;
};

struct RankedTeacher {
    std::size_t position = 0;  ///< 1-based
    std::string teacher_id;
    double score = 0.0;
    bool top1 = false;
    bool top2 = false;
};

/// Best first in `direction`; ties go to the smaller teacher_id.
std::vector<RankedTeacher> rank_teachers(std::span<const TeacherScore> scores, Direction direction);

/// Dataset-level scores for each teacher dataset, optionally on a seeded
/// sample of `sample_size` records (0 = all records).
std::vector<TeacherScore> score_teachers(std::span<const TrajectoryDataset> datasets,
                                         const metrics::TrajectoryMetric& metric, std::size_t sample_size,
                                         std::uint64_t seed, unsigned threads = 1);

} // namespace rsr::select
