// SPDX-License-Identifier: Apache-2.0
#include "rsr/sim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "rsr/core/csv.hpp"
#include "rsr/core/parallel.hpp"

namespace rsr::sim {
namespace {

// Independent RNG streams derived from the run seed.
enum Stream : std::uint64_t { PermB = 0, PermC = 1, Mixture = 2, FamilyBase = 3 };

constexpr std::array<const char*, 4> kFamilyNames = {"X_A", "X_B", "X_C", "X_D"};

} // namespace

std::string_view to_string(MixtureMode m) {
    return m == MixtureMode::Empirical ? "empirical" : "analytic";
}

MixtureMode mixture_mode_from_string(std::string_view text) {
    if (text == "empirical") {
        return MixtureMode::Empirical;
    }
    if (text == "analytic") {
        return MixtureMode::Analytic;
    }
    throw std::invalid_argument("mixture mode must be 'empirical' or 'analytic' (got '" + std::string(text) + "')");
}

void SimulationConfig::validate() const {
    if (!(alpha > 1.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("alpha must be > 1");
    }
    if (vocab_size < 2) {
        throw std::invalid_argument("vocabulary size must be >= 2");
    }
    if (!(m_b > 0 && m_a > m_b)) {
        throw std::invalid_argument("mixture sizes must satisfy M_A > M_B > 0");
    }
    if (tokens_per_trajectory < 1) {
        throw std::invalid_argument("tokens per trajectory must be >= 1");
    }
}

double SimulationConfig::mixture_weight() const {
    return static_cast<double>(m_a) / static_cast<double>(m_a + m_b);
}

std::vector<int> identity_permutation(int n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    return perm;
}

VocabDistribution build_zipf(double alpha, std::span<const int> perm) {
    if (!(alpha > 1.0)) {
        throw std::invalid_argument("Zipf exponent must be > 1");
    }
    const std::size_t v = perm.size();
    std::vector<bool> seen(v, false);
    for (int id : perm) {
        if (id < 0 || static_cast<std::size_t>(id) >= v || seen[static_cast<std::size_t>(id)]) {
            throw std::invalid_argument("invalid permutation");
        }
        seen[static_cast<std::size_t>(id)] = true;
    }
    std::vector<double> weights(v);
    double total = 0.0;
    for (std::size_t i = 0; i < v; ++i) {
        weights[i] = std::pow(static_cast<double>(i + 1), -alpha);
        total += weights[i];
    }
    VocabDistribution d;
    d.perm.assign(perm.begin(), perm.end());
    d.probs.assign(v, 0.0);
    for (std::size_t i = 0; i < v; ++i) {
        d.probs[static_cast<std::size_t>(perm[i])] = weights[i] / total;
    }
    return d;
}

StudentDistribution make_student(std::vector<double> probs) {
    StudentDistribution z;
    const std::size_t v = probs.size();
    z.order.resize(v);
    std::iota(z.order.begin(), z.order.end(), 0);
    std::stable_sort(z.order.begin(), z.order.end(), [&](int a, int b) {
        return probs[static_cast<std::size_t>(a)] > probs[static_cast<std::size_t>(b)];
    });
    z.rank.assign(v, 0);
    // Walk the sorted order; a token's rank is 1 + the number of tokens before its tie group.
    for (std::size_t i = 0; i < v; ++i) {
        const auto id = static_cast<std::size_t>(z.order[i]);
        if (i > 0 && probs[id] == probs[static_cast<std::size_t>(z.order[i - 1])]) {
            z.rank[id] = z.rank[static_cast<std::size_t>(z.order[i - 1])];
        } else {
            z.rank[id] = static_cast<int>(i) + 1;
        }
    }
    z.probs = std::move(probs);
    return z;
}

StudentDistribution build_student_mixture(const SimulationConfig& cfg, const VocabDistribution& z_a,
                                          const VocabDistribution& z_b, Rng& rng) {
    cfg.validate();
    const std::size_t v = z_a.probs.size();
    if (z_b.probs.size() != v) {
        throw std::invalid_argument("mixture components differ in vocabulary size");
    }
    if (cfg.mode == MixtureMode::Analytic) {
        const double pi = cfg.mixture_weight();
        std::vector<double> probs(v);
        for (std::size_t t = 0; t < v; ++t) {
            probs[t] = z_a.probs[t] == z_b.probs[t] ? z_a.probs[t] : pi * z_a.probs[t] + (1.0 - pi) * z_b.probs[t];
        }
        return make_student(std::move(probs));
    }
    std::vector<std::int64_t> counts(v, 0);
    const AliasTable table_a(z_a.probs);
    for (std::int64_t i = 0; i < cfg.m_a; ++i) {
        ++counts[static_cast<std::size_t>(table_a.sample(rng))];
    }
    const AliasTable table_b(z_b.probs);
    for (std::int64_t i = 0; i < cfg.m_b; ++i) {
        ++counts[static_cast<std::size_t>(table_b.sample(rng))];
    }
    const auto total = static_cast<double>(cfg.m_a + cfg.m_b);
    std::vector<double> probs(v);
    for (std::size_t t = 0; t < v; ++t) {
        probs[t] = static_cast<double>(counts[t]) / total;
    }
    StudentDistribution z = make_student(std::move(probs));
    z.counts = std::move(counts);
    return z;
}

std::vector<int> sample_trajectory(std::span<const double> probs, std::int64_t n, std::uint64_t seed) {
    if (n < 1) {
        throw std::invalid_argument("trajectory length must be >= 1");
    }
    const AliasTable table(probs);
    Rng rng(seed);
    std::vector<int> tokens(static_cast<std::size_t>(n));
    for (int& t : tokens) {
        t = table.sample(rng);
    }
    return tokens;
}

std::vector<TokenEval> evaluate_under_student(std::span<const int> tokens, const StudentDistribution& z) {
    const auto v = static_cast<int>(z.probs.size());
    std::vector<TokenEval> out(tokens.size());
    for (std::size_t k = 0; k < tokens.size(); ++k) {
        const int id = tokens[k];
        TokenEval& e = out[k];
        if (id < 0 || id >= v || !(z.probs[static_cast<std::size_t>(id)] > 0.0)) {
            e.prob = kProbabilityFloor;
            e.rank = v;
        } else {
            e.prob = z.probs[static_cast<std::size_t>(id)];
            e.rank = z.rank[static_cast<std::size_t>(id)];
        }
        e.surprisal = -std::log(e.prob);
    }
    return out;
}

SimulationReport run_simulation(const SimulationConfig& cfg, unsigned threads, SimulationOptions options) {
    cfg.validate();
    SimulationReport report;
    report.config = cfg;

    const auto identity = identity_permutation(cfg.vocab_size);
    report.z_a = build_zipf(cfg.alpha, identity);
    if (options.identical_components) {
        report.z_b = report.z_a;
    } else {
        Rng rng(mix_seed(cfg.seed, PermB));
        report.z_b = build_zipf(cfg.alpha, random_permutation(cfg.vocab_size, rng));
    }
    {
        Rng rng(mix_seed(cfg.seed, PermC));
        report.z_c = build_zipf(cfg.alpha, random_permutation(cfg.vocab_size, rng));
    }
    {
        Rng rng(mix_seed(cfg.seed, Mixture));
        report.z = build_student_mixture(cfg, report.z_a, report.z_b, rng);
    }

    const std::array<const std::vector<double>*, 4> sources = {&report.z_a.probs, &report.z_b.probs,
                                                               &report.z_c.probs, &report.z.probs};
    auto rows = parallel_map(sources.size(), threads, [&](std::size_t f) {
        const auto tokens =
            sample_trajectory(*sources[f], cfg.tokens_per_trajectory, mix_seed(cfg.seed, FamilyBase + f));
        const auto evals = evaluate_under_student(tokens, report.z);
        FamilyRow row;
        row.name = kFamilyNames[f];
        for (const TokenEval& e : evals) {
            row.mean_prob += e.prob;
            row.mean_surprisal += e.surprisal;
            row.mean_rank += e.rank;
            row.mean_token_rsr += static_cast<double>(e.rank) / e.surprisal;
        }
        const auto n = static_cast<double>(evals.size());
        row.mean_prob /= n;
        row.mean_surprisal /= n;
        row.mean_rank /= n;
        row.mean_token_rsr /= n;
        return row;
    });
    std::move(rows.begin(), rows.end(), report.rows.begin());
    return report;
}

std::string report_text(const SimulationReport& report) {
    std::ostringstream out;
    out << "family  source  avg_prob  avg_surprisal  avg_rank  avg_token_rsr\n";
    constexpr std::array<const char*, 4> sources = {"Z_A", "Z_B", "Z_C", "Z"};
    for (std::size_t f = 0; f < report.rows.size(); ++f) {
        const FamilyRow& r = report.rows[f];
        char line[128];
        std::snprintf(line, sizeof line, "%-6s  %-6s  %8.4f  %13.4f  %8.4f  %13.4f\n", r.name.c_str(), sources[f],
                      r.mean_prob, r.mean_surprisal, r.mean_rank, r.mean_token_rsr);
        out << line;
    }
    return out.str();
}

std::string report_csv(const SimulationReport& report) {
    std::ostringstream out;
    out << "family,avg_prob,avg_surprisal,avg_rank,avg_token_rsr\n";
    for (const FamilyRow& r : report.rows) {
        out << r.name << ',' << csv::format_real(r.mean_prob) << ',' << csv::format_real(r.mean_surprisal) << ','
            << csv::format_real(r.mean_rank) << ',' << csv::format_real(r.mean_token_rsr) << '\n';
    }
    return out.str();
}

std::string student_csv(const StudentDistribution& z) {
    std::ostringstream out;
    out << "token_id,probability,rank\n";
    for (std::size_t t = 0; t < z.probs.size(); ++t) {
        out << t << ',' << csv::format_real(z.probs[t]) << ',' << z.rank[t] << '\n';
    }
    return out.str();
}

} // namespace rsr::sim
