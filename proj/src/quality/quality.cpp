// SPDX-License-Identifier: Apache-2.0
#include "rsr/quality/quality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rsr/core/errors.hpp"
#include "rsr/core/parallel.hpp"

namespace rsr::quality {
namespace {

bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

char lower(unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

std::size_t count_hits(const std::vector<std::string>& ws, const std::vector<std::string>& keywords) {
    std::size_t hits = 0;
    for (const std::string& w : ws) {
        if (std::find(keywords.begin(), keywords.end(), w) != keywords.end()) {
            ++hits;
        }
    }
    return hits;
}

std::string join_keys(const std::vector<std::string>& keys) {
    std::string out;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (i == 5) {
            out += ", ... (" + std::to_string(keys.size()) + " total)";
            break;
        }
        out += (i ? ", " : "") + keys[i];
    }
    return out;
}

} // namespace

std::string_view criterion_name(std::size_t c) {
    static constexpr std::string_view names[kCriteria] = {"elaborated", "verification", "exploratory", "adaptive"};
    return names[c];
}

void RuleQualityConfig::validate() const {
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) {
            throw std::invalid_argument("quality weights must be non-negative");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("quality weights must sum to 1 (got " + std::to_string(total) + ")");
    }
}

std::vector<std::string> words(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_word_byte(c)) {
            current.push_back(lower(c));
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        out.push_back(std::move(current));
    }
    return out;
}

std::array<double, kCriteria> raw_criteria(std::string_view text, const RuleQualityConfig& cfg) {
    const auto ws = words(text);
    std::array<double, kCriteria> raw{};
    if (ws.empty()) {
        return raw;
    }
    const auto n = static_cast<double>(ws.size());
    raw[Elaborated] = n;
    raw[Verification] = static_cast<double>(count_hits(ws, cfg.verification)) / n;
    raw[Exploratory] = static_cast<double>(count_hits(ws, cfg.exploratory)) / n;
    raw[Adaptive] = static_cast<double>(count_hits(ws, cfg.adaptive)) / n;
    return raw;
}

std::vector<double> z_scores(std::span<const double> values) {
    std::vector<double> z(values.size(), 0.0);
    if (values.empty()) {
        return z;
    }
    const bool constant =
        std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
    if (constant) {
        return z;
    }
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= n;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / n);
    if (!(sd > 0.0)) {
        return z;
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        z[i] = (values[i] - mean) / sd;
    }
    return z;
}

QualityResult rule_based_quality(std::span<const TrajectoryRecord> records, const RuleQualityConfig& cfg,
                                 unsigned threads) {
    cfg.validate();
    std::vector<std::string> missing;
    for (const TrajectoryRecord& r : records) {
        if (!r.text) {
            missing.push_back(r.key());
        }
    }
    if (!missing.empty()) {
        throw InputError("text missing on " + std::to_string(missing.size()) + " record(s): " + join_keys(missing));
    }

    QualityResult result;
    auto raws = parallel_map(records.size(), threads,
                             [&](std::size_t i) { return raw_criteria(*records[i].text, cfg); });
    result.scores.resize(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        result.scores[i].record_key = records[i].key();
        result.scores[i].raw = raws[i];
        if (raws[i][Elaborated] == 0.0) {
            result.warnings.push_back("empty text on " + records[i].key() + "; criteria set to 0");
        }
    }
    std::vector<double> column(records.size());
    for (std::size_t c = 0; c < kCriteria; ++c) {
        for (std::size_t i = 0; i < records.size(); ++i) {
            column[i] = raws[i][c];
        }
        const auto z = z_scores(column);
        for (std::size_t i = 0; i < records.size(); ++i) {
            result.scores[i].z[c] = z[i];
        }
    }
    for (CriterionScores& s : result.scores) {
        double composite = 0.0;
        for (std::size_t c = 0; c < kCriteria; ++c) {
            composite += cfg.weights[c] * s.z[c];
        }
        s.composite = composite;
    }
    return result;
}

QualityResult rule_based_quality(const TrajectoryDataset& ds, const RuleQualityConfig& cfg, unsigned threads) {
    return rule_based_quality(std::span<const TrajectoryRecord>(ds.records), cfg, threads);
}

double avg_token_length(std::span<const TrajectoryRecord> records) {
    if (records.empty()) {
        throw InputError("average token length of an empty dataset");
    }
    double total = 0.0;
    for (const TrajectoryRecord& r : records) {
        total += static_cast<double>(r.tokens.size());
    }
    return total / static_cast<double>(records.size());
}

double verified_accuracy(std::span<const TrajectoryRecord> records) {
    if (records.empty()) {
        throw InputError("verified accuracy of an empty dataset");
    }
    std::vector<std::string> missing;
    std::size_t correct = 0;
    for (const TrajectoryRecord& r : records) {
        if (!r.correct) {
            missing.push_back(r.key());
        } else if (*r.correct) {
            ++correct;
        }
    }
    if (!missing.empty()) {
        throw InputError("correctness label missing on " + std::to_string(missing.size()) +
                         " record(s): " + join_keys(missing));
    }
    return static_cast<double>(correct) / static_cast<double>(records.size());
}

std::vector<double> attach_external_scores(std::span<const TrajectoryRecord> records, const std::string& column) {
    std::vector<double> values;
    values.reserve(records.size());
    std::vector<std::string> missing;
    for (const TrajectoryRecord& r : records) {
        auto it = r.external_scores.find(column);
        if (it == r.external_scores.end()) {
            missing.push_back(r.key());
        } else {
            values.push_back(it->second);
        }
    }
    if (!missing.empty()) {
        throw InputError("external score '" + column + "' missing on " + std::to_string(missing.size()) +
                         " record(s): " + join_keys(missing));
    }
    return values;
}

} // namespace rsr::quality
