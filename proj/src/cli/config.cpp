// SPDX-License-Identifier: Apache-2.0
#include "rsr/cli/config.hpp"

#include <cstdio>
#include <set>

#include "rsr/core/errors.hpp"

namespace rsr::cli {
namespace {

template <typename T>
void take(const nlohmann::json& j, const char* key, T& field, const std::string& source) {
    auto it = j.find(key);
    if (it == j.end()) {
        return;
    }
    try {
        field = it->get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad value for '") + key + "': " + e.what(), source);
    }
}

} // namespace

std::string_view tool_version() {
    return RSR_VERSION;
}

std::string default_fixture_dir() {
    return RSR_FIXTURE_DIR;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["command"] = c.command;
    j["inputs"] = c.inputs;
    j["metrics"] = c.metrics;
    j["direction"] = c.direction ? nlohmann::ordered_json(*c.direction) : nlohmann::ordered_json(nullptr);
    j["r_max"] = c.r_max;
    j["filter_h"] = c.filter_h;
    j["power_rank"] = c.power_rank;
    j["power_surprisal"] = c.power_surprisal;
    j["seed"] = c.seed ? nlohmann::ordered_json(*c.seed) : nlohmann::ordered_json(nullptr);
    j["n_sample"] = c.n_sample;
    j["correctness_filter"] = c.correctness_filter;
    j["scores"] = c.scores;
    j["performance"] = c.performance;
    j["student"] = c.student;
    j["teachers"] = c.teachers;
    j["alpha"] = c.alpha;
    j["vocab_size"] = c.vocab_size;
    j["m_a"] = c.m_a;
    j["m_b"] = c.m_b;
    j["tokens_per_trajectory"] = c.tokens_per_trajectory;
    j["mixture_mode"] = c.mixture_mode;
    return j;
}

void apply_json(RunConfig& c, const nlohmann::json& j, const std::string& source) {
    if (!j.is_object()) {
        throw InputError("config must be a JSON object", source);
    }
    static const std::set<std::string> known = {
        "inputs", "out", "threads", "metrics", "direction", "r_max", "filter_h", "power_rank", "power_surprisal",
        "seed", "n_sample", "correctness_filter", "scores", "performance", "student", "teachers", "alpha",
        "vocab_size", "m_a", "m_b", "tokens_per_trajectory", "mixture_mode"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) {
            throw InputError("unknown config key '" + key + "'", source);
        }
    }
    take(j, "inputs", c.inputs, source);
    take(j, "out", c.out, source);
    take(j, "threads", c.threads, source);
    take(j, "metrics", c.metrics, source);
    if (auto it = j.find("direction"); it != j.end()) {
        if (it->is_null()) {
            c.direction.reset();
        } else {
            std::string d;
            take(j, "direction", d, source);
            c.direction = d;
        }
    }
    take(j, "r_max", c.r_max, source);
    take(j, "filter_h", c.filter_h, source);
    take(j, "power_rank", c.power_rank, source);
    take(j, "power_surprisal", c.power_surprisal, source);
    if (auto it = j.find("seed"); it != j.end()) {
        if (it->is_null()) {
            c.seed.reset();
        } else {
            std::uint64_t seed = 0;
            take(j, "seed", seed, source);
            c.seed = seed;
        }
    }
    take(j, "n_sample", c.n_sample, source);
    take(j, "correctness_filter", c.correctness_filter, source);
    take(j, "scores", c.scores, source);
    take(j, "performance", c.performance, source);
    take(j, "student", c.student, source);
    take(j, "teachers", c.teachers, source);
    take(j, "alpha", c.alpha, source);
    take(j, "vocab_size", c.vocab_size, source);
    take(j, "m_a", c.m_a, source);
    take(j, "m_b", c.m_b, source);
    take(j, "tokens_per_trajectory", c.tokens_per_trajectory, source);
    take(j, "mixture_mode", c.mixture_mode, source);
}

std::string config_hash(const RunConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_json(cfg).dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> header_lines(const RunConfig& cfg) {
    return {"tool: rsr " + std::string(tool_version()), "config_hash: " + config_hash(cfg),
            "config: " + to_json(cfg).dump()};
}

} // namespace rsr::cli
