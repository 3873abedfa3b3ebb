// SPDX-License-Identifier: Apache-2.0
#include "rsr/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "rsr/core/errors.hpp"

namespace rsr::metrics {
namespace {

void require_tokens(const TrajectoryRecord& traj) {
    if (traj.tokens.empty()) {
        throw MetricError("empty trajectory " + traj.key());
    }
}

void require_cap(const TrajectoryRecord& traj, ClipThreshold clip) {
    if (traj.k_ext < clip.r_max()) {
        throw MetricError("extraction cap below clip threshold for " + traj.key() + " (k_ext " +
                          std::to_string(traj.k_ext) + " < r_max " + std::to_string(clip.r_max()) + ")");
    }
}

double surprisal_sum(const TrajectoryRecord& traj) {
    double total = 0.0;
    for (const TokenStat& t : traj.tokens) {
        total += t.surprisal;
    }
    return total;
}

double require_positive_surprisal(const TrajectoryRecord& traj) {
    double total = surprisal_sum(traj);
    if (!(total > kEpsilon)) {
        throw MetricError("total surprisal is zero for " + traj.key());
    }
    return total;
}

} // namespace

ClipThreshold::ClipThreshold(std::int64_t r_max) : r_max_(r_max) {
    if (r_max < 1) {
        throw MetricError("r_max must be >= 1 (got " + std::to_string(r_max) + ")");
    }
}

double token_rsr(const TokenStat& token) {
    if (!(token.surprisal > kEpsilon)) {
        throw MetricError("unbounded token ratio: surprisal " + std::to_string(token.surprisal));
    }
    return static_cast<double>(token.rank) / token.surprisal;
}

double trajectory_rsr(const TrajectoryRecord& traj, ClipThreshold clip) {
    require_tokens(traj);
    require_cap(traj, clip);
    double ranks = 0.0;
    double surprisal = 0.0;
    for (const TokenStat& t : traj.tokens) {
        ranks += static_cast<double>(clip_rank(t.rank, clip));
        surprisal += t.surprisal;
    }
    if (!(surprisal > kEpsilon)) {
        throw MetricError("total surprisal is zero for " + traj.key());
    }
    return ranks / surprisal;
}

double weighted_avg_token_rsr(const TrajectoryRecord& traj, ClipThreshold clip) {
    require_tokens(traj);
    require_cap(traj, clip);
    double weights = require_positive_surprisal(traj);
    double weighted = 0.0;
    for (const TokenStat& t : traj.tokens) {
        const double r = static_cast<double>(clip_rank(t.rank, clip));
        // s * (r / s) -> r as s -> 0; a zero-surprisal token contributes its rank.
        weighted += t.surprisal > 0.0 ? t.surprisal * (r / t.surprisal) : r;
    }
    return weighted / weights;
}

double avg_surprisal(const TrajectoryRecord& traj) {
    require_tokens(traj);
    return surprisal_sum(traj) / static_cast<double>(traj.tokens.size());
}

double avg_local_surprisal(const TrajectoryRecord& traj) {
    require_tokens(traj);
    double total = 0.0;
    for (std::size_t k = 0; k < traj.tokens.size(); ++k) {
        const auto& ls = traj.tokens[k].local_surprisal;
        if (!ls) {
            throw MetricError("local surprisal unavailable: token " + std::to_string(k) + " of " + traj.key());
        }
        total += *ls;
    }
    return total / static_cast<double>(traj.tokens.size());
}

double avg_rank(const TrajectoryRecord& traj, std::optional<ClipThreshold> clip) {
    require_tokens(traj);
    double total = 0.0;
    if (clip) {
        require_cap(traj, *clip);
        for (const TokenStat& t : traj.tokens) {
            total += static_cast<double>(clip_rank(t.rank, *clip));
        }
    } else {
        std::size_t saturated = 0;
        for (const TokenStat& t : traj.tokens) {
            saturated += t.rank_saturated ? 1 : 0;
            total += static_cast<double>(t.rank);
        }
        if (saturated > 0) {
            throw MetricError("unclipped mean rank requested on saturated data: " + std::to_string(saturated) +
                              " of " + std::to_string(traj.tokens.size()) + " ranks saturated in " + traj.key());
        }
    }
    return total / static_cast<double>(traj.tokens.size());
}

double avg_token_rsr(const TrajectoryRecord& traj) {
    require_tokens(traj);
    double total = 0.0;
    for (const TokenStat& t : traj.tokens) {
        total += token_rsr(t);
    }
    return total / static_cast<double>(traj.tokens.size());
}

double filtered_avg_token_rsr(const TrajectoryRecord& traj, double h_percent, ClipThreshold clip) {
    require_tokens(traj);
    require_cap(traj, clip);
    if (!(h_percent > 0.0 && h_percent <= 100.0)) {
        throw MetricError("filter percentage must lie in (0, 100]");
    }
    const std::size_t n = traj.tokens.size();
    const auto positive = static_cast<std::size_t>(std::count_if(
        traj.tokens.begin(), traj.tokens.end(), [](const TokenStat& t) { return t.surprisal > kEpsilon; }));
    if (positive == 0) {
        throw MetricError("filtered subset contains only zero-surprisal tokens in " + traj.key());
    }
    // h * n is exact for integral h, so the quotient is an integer exactly when it should be.
    auto keep = static_cast<std::size_t>(std::ceil(h_percent * static_cast<double>(n) / 100.0));
    // Zero-surprisal tokens never enter the subset; they sort last anyway.
    keep = std::clamp<std::size_t>(keep, 1, positive);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return traj.tokens[a].surprisal > traj.tokens[b].surprisal;
    });

    double total = 0.0;
    for (std::size_t i = 0; i < keep; ++i) {
        const TokenStat& t = traj.tokens[order[i]];
        total += static_cast<double>(clip_rank(t.rank, clip)) / t.surprisal;
    }
    return total / static_cast<double>(keep);
}

double rank_minus_surprisal(const TrajectoryRecord& traj, ClipThreshold clip) {
    require_tokens(traj);
    require_cap(traj, clip);
    double total = 0.0;
    for (const TokenStat& t : traj.tokens) {
        total += static_cast<double>(clip_rank(t.rank, clip)) - t.surprisal;
    }
    return total / static_cast<double>(traj.tokens.size());
}

double rank_entropy_ratio(const TrajectoryRecord& traj, ClipThreshold clip) {
    require_tokens(traj);
    require_cap(traj, clip);
    double ranks = 0.0;
    double entropy = 0.0;
    for (std::size_t k = 0; k < traj.tokens.size(); ++k) {
        const TokenStat& t = traj.tokens[k];
        if (!t.entropy) {
            throw MetricError("entropy unavailable: token " + std::to_string(k) + " of " + traj.key());
        }
        ranks += static_cast<double>(clip_rank(t.rank, clip));
        entropy += *t.entropy;
    }
    if (!(entropy > kEpsilon)) {
        throw MetricError("total entropy is zero for " + traj.key());
    }
    // Means share the token count, so it cancels.
    return ranks / entropy;
}

double power_rsr(const TrajectoryRecord& traj, ClipThreshold clip, PowerExponents exponents) {
    require_tokens(traj);
    require_cap(traj, clip);
    double ranks = 0.0;
    double surprisal = 0.0;
    for (const TokenStat& t : traj.tokens) {
        ranks += std::pow(static_cast<double>(clip_rank(t.rank, clip)), exponents.rank);
        surprisal += std::pow(t.surprisal, exponents.surprisal);
    }
    if (!(surprisal > kEpsilon)) {
        throw MetricError("total powered surprisal is zero for " + traj.key());
    }
    return ranks / surprisal;
}

TrajectoryMeans trajectory_means(const TrajectoryRecord& traj, ClipThreshold clip) {
    require_tokens(traj);
    require_cap(traj, clip);
    double ranks = 0.0;
    double surprisal = 0.0;
    for (const TokenStat& t : traj.tokens) {
        ranks += static_cast<double>(clip_rank(t.rank, clip));
        surprisal += t.surprisal;
    }
    if (!(surprisal > kEpsilon)) {
        throw MetricError("total surprisal is zero for " + traj.key());
    }
    const auto n = static_cast<double>(traj.tokens.size());
    return {ranks / n, surprisal / n};
}

void DatasetRsrAccumulator::add(const TrajectoryMeans& means) {
    rank_sum_ += means.mean_clipped_rank;
    surprisal_sum_ += means.mean_surprisal;
    ++count_;
}

double DatasetRsrAccumulator::value() const {
    if (count_ == 0) {
        throw MetricError("dataset RSR of an empty dataset");
    }
    return rank_sum_ / surprisal_sum_;
}

double dataset_rsr(std::span<const TrajectoryRecord> records, ClipThreshold clip) {
    DatasetRsrAccumulator acc(clip);
    for (const TrajectoryRecord& r : records) {
        acc.add(r);
    }
    return acc.value();
}

double dataset_rsr(const TrajectoryDataset& dataset, ClipThreshold clip) {
    if (dataset.k_ext < clip.r_max()) {
        throw MetricError("extraction cap below clip threshold for dataset " + dataset.dataset_id);
    }
    return dataset_rsr(std::span<const TrajectoryRecord>(dataset.records), clip);
}

double dataset_simple_mean(std::span<const TrajectoryRecord> records, const TrajectoryFn& metric) {
    if (records.empty()) {
        throw MetricError("dataset mean of an empty dataset");
    }
    double total = 0.0;
    for (const TrajectoryRecord& r : records) {
        total += metric(r);
    }
    return total / static_cast<double>(records.size());
}

} // namespace rsr::metrics
