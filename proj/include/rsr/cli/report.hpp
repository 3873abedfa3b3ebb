// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "rsr/cli/config.hpp"
#include "rsr/core/types.hpp"
#include "rsr/core/validation.hpp"
#include "rsr/quality/quality.hpp"
#include "rsr/select/selection.hpp"

namespace rsr::cli {

/// "# "-prefixed provenance block for text and CSV reports.
std::string comment_header(const RunConfig& cfg, const std::vector<std::string>& extra = {});

/// First line of a line-delimited report: {"header": {...}}.
std::string jsonl_header(const RunConfig& cfg);

struct DatasetScores {
    const TrajectoryDataset* dataset = nullptr;
    std::vector<std::vector<double>> per_record;  ///< [metric][record]
    std::vector<double> aggregate;                ///< [metric]
};

std::string scores_csv(const RunConfig& cfg, std::span<const std::string> metrics,
                       std::span<const DatasetScores> scores);
std::string scores_jsonl(const RunConfig& cfg, std::span<const std::string> metrics,
                         std::span<const DatasetScores> scores);

std::string validation_text(const std::string& input, const ValidationReport& report);

std::string manifest_jsonl(const RunConfig& cfg, const select::SelectionManifest& manifest);
std::string composition_text(const RunConfig& cfg, const select::SelectionManifest& manifest);

std::string teachers_csv(const RunConfig& cfg, std::span<const select::RankedTeacher> ranked);
std::string teachers_text(const RunConfig& cfg, const std::string& metric, std::span<const select::RankedTeacher> ranked);

struct QualityRun {
    const TrajectoryDataset* dataset = nullptr;
    quality::QualityResult result;
};

std::string quality_csv(const RunConfig& cfg, std::span<const QualityRun> runs);

} // namespace rsr::cli
