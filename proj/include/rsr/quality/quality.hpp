// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsr/core/types.hpp"

namespace rsr::quality {

enum Criterion : std::size_t { Elaborated = 0, Verification = 1, Exploratory = 2, Adaptive = 3 };
inline constexpr std::size_t kCriteria = 4;

std::string_view criterion_name(std::size_t c);

struct RuleQualityConfig {
    std::array<double, kCriteria> weights{0.30, 0.20, 0.25, 0.25};
    std::vector<std::string> verification{"check", "verify"};
    std::vector<std::string> exploratory{"perhaps", "might"};
    std::vector<std::string> adaptive{"therefore", "since"};

    /// Throws std::invalid_argument unless weights are non-negative and sum to 1.
    void validate() const;
};

/// Lowercased words of `text`. A word is a maximal run of ASCII letters,
/// digits, or non-ASCII bytes.
std::vector<std::string> words(std::string_view text);

/// Raw criterion values: word count, then keyword hits per word for each set.
std::array<double, kCriteria> raw_criteria(std::string_view text, const RuleQualityConfig& cfg);

struct CriterionScores {
    std::string record_key;
    std::array<double, kCriteria> raw{};
    std::array<double, kCriteria> z{};
    double composite = 0.0;
};

struct QualityResult {
    std::vector<CriterionScores> scores;
    std::vector<std::string> warnings;
};

/// Population z-scores of `values`. A criterion whose values are all equal gets
/// z = 0 throughout.
std::vector<double> z_scores(std::span<const double> values);

/// Rule-based quality for every record, z-scored over the records given.
/// Throws InputError listing records without text.
QualityResult rule_based_quality(std::span<const TrajectoryRecord> records, const RuleQualityConfig& cfg = {},
                                 unsigned threads = 1);
QualityResult rule_based_quality(const TrajectoryDataset& ds, const RuleQualityConfig& cfg = {},
                                 unsigned threads = 1);

/// Mean token count per record.
double avg_token_length(std::span<const TrajectoryRecord> records);

/// Fraction of records labeled correct. Throws InputError listing unlabeled records.
double verified_accuracy(std::span<const TrajectoryRecord> records);

/// Values of external score `column` in record order. Throws InputError listing
/// every record that lacks it.
std::vector<double> attach_external_scores(std::span<const TrajectoryRecord> records, const std::string& column);

} // namespace rsr::quality
