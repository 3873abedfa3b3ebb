// SPDX-License-Identifier: Apache-2.0
//
// Token-, trajectory- and dataset-level suitability metrics built from
// per-token surprisal and rank under a student model.
//
// Conventions shared by every function here:
//  * Summation follows token order, then record order, so results are
//    bit-reproducible regardless of how callers parallelize over records.
//  * Clipped metrics require the record's extraction cap to be at least r_max;
//    saturated ranks are then legal because clipping collapses them.
//  * Preconditions that fail raise MetricError.
#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "rsr/core/types.hpp"

namespace rsr::metrics {

/// Surprisal (or surprisal sum) at or below this is treated as zero.
inline constexpr double kEpsilon = 1e-12;

/// Rank clipping threshold r_max.
class ClipThreshold {
public:
    static constexpr std::int64_t kDefault = 100;

    constexpr ClipThreshold() = default;
    explicit ClipThreshold(std::int64_t r_max);

    constexpr std::int64_t r_max() const noexcept { return r_max_; }

private:
    std::int64_t r_max_ = kDefault;
};

/// Share H (percent, in (0, 100]) of highest-surprisal tokens kept by the filtered average.
inline constexpr double kDefaultFilterPercent = 30.0;

struct PowerExponents {
    double rank = 1.0;
    double surprisal = 1.0;
};

constexpr std::int64_t clip_rank(std::int64_t rank, ClipThreshold clip) noexcept {
    return rank < clip.r_max() ? rank : clip.r_max();
}

/// rank / surprisal with the unclipped rank. Throws on surprisal <= kEpsilon
/// ("unbounded token ratio").
double token_rsr(const TokenStat& token);

/// Sum of clipped ranks over sum of surprisals.
double trajectory_rsr(const TrajectoryRecord& traj, ClipThreshold clip = {});

/// Surprisal-weighted mean of per-token clipped ratios. Algebraically equal to
/// trajectory_rsr; computed along the weighted-mean route so the two can be
/// checked against each other.
double weighted_avg_token_rsr(const TrajectoryRecord& traj, ClipThreshold clip = {});

double avg_surprisal(const TrajectoryRecord& traj);
double avg_local_surprisal(const TrajectoryRecord& traj);

/// Mean rank, clipped when `clip` is given. Unclipped means are refused when
/// any rank is saturated because the true ranks are unknown.
double avg_rank(const TrajectoryRecord& traj, std::optional<ClipThreshold> clip = std::nullopt);

/// Plain mean of unclipped token ratios over all tokens.
double avg_token_rsr(const TrajectoryRecord& traj);

/// Mean of clipped token ratios over the ceil(H% * T) highest-surprisal tokens.
/// Ties in surprisal keep the earlier token.
double filtered_avg_token_rsr(const TrajectoryRecord& traj, double h_percent = kDefaultFilterPercent,
                              ClipThreshold clip = {});

/// Mean over tokens of (clipped rank - surprisal).
double rank_minus_surprisal(const TrajectoryRecord& traj, ClipThreshold clip = {});

/// Mean clipped rank over mean token entropy.
double rank_entropy_ratio(const TrajectoryRecord& traj, ClipThreshold clip = {});

/// Sum of clipped_rank^p_rank over sum of surprisal^p_surprisal.
double power_rsr(const TrajectoryRecord& traj, ClipThreshold clip, PowerExponents exponents);

/// Per-trajectory mean clipped rank and mean surprisal.
struct TrajectoryMeans {
    double mean_clipped_rank = 0.0;
    double mean_surprisal = 0.0;
};
TrajectoryMeans trajectory_means(const TrajectoryRecord& traj, ClipThreshold clip = {});

/// Dataset RSR: sum over trajectories of mean clipped rank, over the sum of
/// mean surprisal. Equal to the mean-surprisal-weighted mean of trajectory RSRs.
double dataset_rsr(std::span<const TrajectoryRecord> records, ClipThreshold clip = {});
double dataset_rsr(const TrajectoryDataset& dataset, ClipThreshold clip = {});

/// Streaming form of dataset_rsr: feed records one at a time.
class DatasetRsrAccumulator {
public:
    explicit DatasetRsrAccumulator(ClipThreshold clip = {}) : clip_(clip) {}

    void add(const TrajectoryRecord& traj) { add(trajectory_means(traj, clip_)); }
    void add(const TrajectoryMeans& means);

    std::size_t count() const noexcept { return count_; }
    double value() const;

private:
    ClipThreshold clip_;
    double rank_sum_ = 0.0;
    double surprisal_sum_ = 0.0;
    std::size_t count_ = 0;
};

using TrajectoryFn = std::function<double(const TrajectoryRecord&)>;

/// Unweighted mean of a trajectory-level metric over records.
double dataset_simple_mean(std::span<const TrajectoryRecord> records, const TrajectoryFn& metric);

} // namespace rsr::metrics
