// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace rsr::cli {

std::string_view tool_version();
std::string default_fixture_dir();

/// Everything a run depends on. Flags fill it first; a --config file then
/// overrides any key it names.
struct RunConfig {
    std::string command;
    std::vector<std::string> inputs;
    std::string out;  ///< output directory; empty prints the main report to stdout
    unsigned threads = 1;

    std::vector<std::string> metrics;  ///< empty: command default
    std::optional<std::string> direction;  ///< defaults to the metric's preferred direction
    std::int64_t r_max = 100;
    double filter_h = 30.0;
    double power_rank = 1.0;
    double power_surprisal = 1.0;

    std::optional<std::uint64_t> seed;  ///< empty: command default
    std::size_t n_sample = 200;
    bool correctness_filter = false;

    std::string scores;       ///< wide score CSV (select-teacher, correlate)
    std::string performance;  ///< performance CSV (correlate)
    std::string student;      ///< select-teacher from a score table
    std::vector<std::string> teachers;

    double alpha = 2.3;
    int vocab_size = 50;
    std::int64_t m_a = 1'000'000;
    std::int64_t m_b = 250'000;
    std::int64_t tokens_per_trajectory = 10'000;
    std::string mixture_mode = "empirical";
};

/// Settings that shape results, in canonical key order. Worker count and
/// output location are left out since they never change report contents.
nlohmann::ordered_json to_json(const RunConfig& cfg);

/// Applies every key present in `j`; unknown keys and wrong types throw InputError.
void apply_json(RunConfig& cfg, const nlohmann::json& j, const std::string& source);

/// 16 hex digits of FNV-1a over the canonical JSON dump.
std::string config_hash(const RunConfig& cfg);

/// Provenance lines shared by every report (without comment markers).
std::vector<std::string> header_lines(const RunConfig& cfg);

} // namespace rsr::cli
