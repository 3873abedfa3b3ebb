// SPDX-License-Identifier: Apache-2.0
#include "rsr/cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "rsr/core/csv.hpp"

namespace rsr::cli {
namespace {

std::string fixed(double v, int digits) {
    return csv::format_fixed(v, digits);
}

nlohmann::ordered_json real(double v) {
    if (!std::isfinite(v)) {
        return csv::format_real(v);
    }
    return v;
}

} // namespace

std::string comment_header(const RunConfig& cfg, const std::vector<std::string>& extra) {
    std::string out;
    for (const auto& line : header_lines(cfg)) {
        out += "# " + line + "\n";
    }
    for (const auto& line : extra) {
        out += "# " + line + "\n";
    }
    return out;
}

std::string jsonl_header(const RunConfig& cfg) {
    nlohmann::ordered_json h;
    h["tool"] = "rsr " + std::string(tool_version());
    h["config_hash"] = config_hash(cfg);
    h["config"] = to_json(cfg);
    nlohmann::ordered_json line;
    line["header"] = std::move(h);
    return line.dump() + "\n";
}

std::string scores_csv(const RunConfig& cfg, std::span<const std::string> metrics,
                       std::span<const DatasetScores> scores) {
    std::ostringstream out;
    out << comment_header(cfg, {"aggregate rows have problem_id '*': rsr is surprisal-weighted, other metrics "
                                "are simple means"});
    std::vector<std::string> header{"dataset_id", "problem_id", "teacher_id", "rollout_id"};
    header.insert(header.end(), metrics.begin(), metrics.end());
    out << csv::join(header) << '\n';
    for (const DatasetScores& d : scores) {
        const auto& records = d.dataset->records;
        for (std::size_t r = 0; r < records.size(); ++r) {
            std::vector<std::string> row{d.dataset->dataset_id, records[r].problem_id, records[r].teacher_id,
                                         std::to_string(records[r].rollout_id)};
            for (std::size_t m = 0; m < metrics.size(); ++m) {
                row.push_back(csv::format_real(d.per_record[m][r]));
            }
            out << csv::join(row) << '\n';
        }
        std::vector<std::string> row{d.dataset->dataset_id, "*", "", ""};
        for (double v : d.aggregate) {
            row.push_back(csv::format_real(v));
        }
        out << csv::join(row) << '\n';
    }
    return out.str();
}

std::string scores_jsonl(const RunConfig& cfg, std::span<const std::string> metrics,
                         std::span<const DatasetScores> scores) {
    std::string out = jsonl_header(cfg);
    for (const DatasetScores& d : scores) {
        const auto& records = d.dataset->records;
        for (std::size_t r = 0; r < records.size(); ++r) {
            nlohmann::ordered_json line;
            line["dataset_id"] = d.dataset->dataset_id;
            line["problem_id"] = records[r].problem_id;
            line["teacher_id"] = records[r].teacher_id;
            line["rollout_id"] = records[r].rollout_id;
            nlohmann::ordered_json values;
            for (std::size_t m = 0; m < metrics.size(); ++m) {
                values[metrics[m]] = real(d.per_record[m][r]);
            }
            line["scores"] = std::move(values);
            out += line.dump() + "\n";
        }
        nlohmann::ordered_json line;
        line["dataset_id"] = d.dataset->dataset_id;
        line["student_id"] = d.dataset->student_id;
        line["records"] = records.size();
        nlohmann::ordered_json values;
        for (std::size_t m = 0; m < metrics.size(); ++m) {
            values[metrics[m]] = real(d.aggregate[m]);
        }
        line["dataset_scores"] = std::move(values);
        out += line.dump() + "\n";
    }
    return out;
}

std::string validation_text(const std::string& input, const ValidationReport& report) {
    std::ostringstream out;
    out << "input: " << input << '\n';
    out << "records: " << report.records << '\n';
    out << "tokens: " << report.total_tokens << '\n';
    out << "saturated: " << report.saturated_tokens << " (fraction " << fixed(report.saturation_fraction(), 4)
        << ")\n";
    out << "violations: " << report.violations.size() << '\n';
    for (const Violation& v : report.violations) {
        out << "  " << (v.location.empty() ? "" : v.location + ": ") << v.message << '\n';
    }
    return out.str();
}

std::string manifest_jsonl(const RunConfig& cfg, const select::SelectionManifest& manifest) {
    std::string out = jsonl_header(cfg);
    for (const select::Choice& c : manifest.choices) {
        nlohmann::ordered_json line;
        line["problem_id"] = c.problem_id;
        line["teacher_id"] = c.teacher_id;
        line["rollout_id"] = c.rollout_id;
        line["value"] = real(c.value);
        line["pool_size"] = c.pool_size;
        if (manifest.correctness_filtered) {
            line["filtered"] = c.filtered;
        }
        out += line.dump() + "\n";
    }
    return out;
}

std::string composition_text(const RunConfig& cfg, const select::SelectionManifest& manifest) {
    std::ostringstream out;
    out << comment_header(cfg);
    out << "metric: " << manifest.metric << " (" << metrics::to_string(manifest.direction) << ")"
        << (manifest.correctness_filtered ? ", correct candidates first" : "") << '\n';
    out << "problems: " << manifest.choices.size() << '\n';
    std::size_t width = std::string("teacher").size();
    for (const auto& s : manifest.composition) {
        width = std::max(width, s.teacher_id.size());
    }
    char line[256];
    std::snprintf(line, sizeof line, "%-*s  %8s  %8s  %12s\n", static_cast<int>(width), "teacher", "count",
                  "percent", "mean_metric");
    out << line;
    for (const auto& s : manifest.composition) {
        std::snprintf(line, sizeof line, "%-*s  %8zu  %8.2f  %12.4f\n", static_cast<int>(width), s.teacher_id.c_str(),
                      s.count, s.percent, s.mean_value);
        out << line;
    }
    return out.str();
}

std::string teachers_csv(const RunConfig& cfg, std::span<const select::RankedTeacher> ranked) {
    std::ostringstream out;
    out << comment_header(cfg);
    out << "position,teacher_id,score,top1,top2\n";
    for (const auto& t : ranked) {
        out << t.position << ',' << csv::escape(t.teacher_id) << ',' << csv::format_real(t.score) << ','
            << (t.top1 ? 1 : 0) << ',' << (t.top2 ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string teachers_text(const RunConfig& cfg, const std::string& metric,
                          std::span<const select::RankedTeacher> ranked) {
    std::ostringstream out;
    out << comment_header(cfg);
    out << "teacher ranking by " << metric << '\n';
    std::size_t width = std::string("teacher").size();
    for (const auto& t : ranked) {
        width = std::max(width, t.teacher_id.size());
    }
    char line[256];
    std::snprintf(line, sizeof line, "%4s  %-*s  %10s  %s\n", "pos", static_cast<int>(width), "teacher", "score",
                  "flag");
    out << line;
    for (const auto& t : ranked) {
        std::snprintf(line, sizeof line, "%4zu  %-*s  %10.4f", t.position, static_cast<int>(width),
                      t.teacher_id.c_str(), t.score);
        out << line;
        if (t.top1 || t.top2) {
            out << "  " << (t.top1 ? "Top-1" : "Top-2");
        }
        out << '\n';
    }
    return out.str();
}

std::string quality_csv(const RunConfig& cfg, std::span<const QualityRun> runs) {
    std::ostringstream out;
    out << comment_header(cfg, {"z-scores use the population standard deviation within each dataset"});
    for (const QualityRun& run : runs) {
        for (const auto& w : run.result.warnings) {
            out << "# warning: " << run.dataset->dataset_id << ": " << w << '\n';
        }
    }
    std::vector<std::string> header{"dataset_id", "record"};
    for (std::size_t c = 0; c < quality::kCriteria; ++c) {
        header.emplace_back(std::string(quality::criterion_name(c)) + "_raw");
    }
    for (std::size_t c = 0; c < quality::kCriteria; ++c) {
        header.emplace_back(std::string(quality::criterion_name(c)) + "_z");
    }
    header.emplace_back("composite");
    out << csv::join(header) << '\n';
    for (const QualityRun& run : runs) {
        for (const auto& s : run.result.scores) {
            std::vector<std::string> row{run.dataset->dataset_id, s.record_key};
            for (double v : s.raw) {
                row.push_back(csv::format_real(v));
            }
            for (double v : s.z) {
                row.push_back(csv::format_real(v));
            }
            row.push_back(csv::format_real(s.composite));
            out << csv::join(row) << '\n';
        }
    }
    return out.str();
}

} // namespace rsr::cli
