// SPDX-License-Identifier: Apache-2.0
#include "rsr/core/validation.hpp"

#include <istream>
#include <set>

#include "rsr/core/errors.hpp"
#include "rsr/core/token_stats_io.hpp"

namespace rsr {
namespace {

constexpr double kZeroSurprisal = 1e-12;

void check_records(const TrajectoryDataset& ds, ValidationReport& report,
                   const std::vector<std::string>& locations) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        const TrajectoryRecord& rec = ds.records[i];
        const std::string& loc = locations.empty() ? rec.key() : locations[i];
        ++report.records;
        if (!seen.insert(rec.key()).second) {
            report.violations.push_back({loc, "duplicate record key " + rec.key()});
        }
        if (rec.k_ext != ds.k_ext) {
            report.violations.push_back({loc, "k_ext " + std::to_string(rec.k_ext) +
                                                  " differs from dataset k_ext " + std::to_string(ds.k_ext)});
        }
        if (rec.tokens.empty()) {
            report.violations.push_back({loc, "empty trajectory"});
            continue;
        }
        double total = 0.0;
        for (std::size_t k = 0; k < rec.tokens.size(); ++k) {
            const TokenStat& t = rec.tokens[k];
            ++report.total_tokens;
            if (t.rank_saturated) {
                ++report.saturated_tokens;
                if (t.rank != rec.k_ext) {
                    report.violations.push_back({loc, "token " + std::to_string(k) +
                                                          " saturated but rank differs from k_ext"});
                }
            }
            if (!(t.surprisal >= 0.0)) {
                report.violations.push_back({loc, "token " + std::to_string(k) + " has negative surprisal"});
            }
            if (t.rank < 1) {
                report.violations.push_back({loc, "token " + std::to_string(k) + " has rank < 1"});
            }
            total += t.surprisal;
        }
        if (!(total > kZeroSurprisal)) {
            report.violations.push_back({loc, "total surprisal is zero"});
        }
    }
}

} // namespace

ValidationReport validate_dataset(const TrajectoryDataset& dataset, std::int64_t r_max) {
    ValidationReport report;
    if (r_max < 1) {
        report.violations.push_back({dataset.dataset_id, "r_max must be >= 1"});
    } else if (dataset.k_ext < r_max) {
        report.violations.push_back({dataset.dataset_id, std::string(kCapBelowClip) + " (k_ext " +
                                                             std::to_string(dataset.k_ext) + " < r_max " +
                                                             std::to_string(r_max) + ")"});
    }
    check_records(dataset, report, {});
    return report;
}

ValidationReport validate_stream(std::istream& in, const std::string& source_name, std::int64_t r_max) {
    ValidationReport parse_report;
    TrajectoryDataset ds;
    ds.dataset_id = source_name;
    std::vector<std::string> locations;
    bool cap_known = false;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        const std::string loc = source_name + ":" + std::to_string(line_no);
        try {
            TrajectoryRecord rec = parse_record_line(line, loc);
            if (!cap_known) {
                ds.k_ext = rec.k_ext;
                cap_known = true;
            }
            ds.records.push_back(std::move(rec));
            locations.push_back(loc);
        } catch (const InputError& e) {
            parse_report.violations.push_back({e.location(), e.message()});
        }
    }

    ValidationReport report;
    if (cap_known && r_max >= 1 && ds.k_ext < r_max) {
        report.violations.push_back({source_name, std::string(kCapBelowClip) + " (k_ext " +
                                                      std::to_string(ds.k_ext) + " < r_max " +
                                                      std::to_string(r_max) + ")"});
    }
    if (r_max < 1) {
        report.violations.push_back({source_name, "r_max must be >= 1"});
    }
    if (!cap_known && parse_report.violations.empty()) {
        report.violations.push_back({source_name, "no records"});
    }
    check_records(ds, report, locations);
    report.records += parse_report.violations.size();
    report.violations.insert(report.violations.begin(), parse_report.violations.begin(),
                             parse_report.violations.end());
    return report;
}

} // namespace rsr
