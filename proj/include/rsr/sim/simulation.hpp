// SPDX-License-Identifier: Apache-2.0
//
// Zipf-mixture toy study: a bimodal student distribution Z built from two
// Zipf components, and four trajectory families evaluated under it.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsr/core/random.hpp"

namespace rsr::sim {

enum class MixtureMode { Empirical, Analytic };

std::string_view to_string(MixtureMode m);
MixtureMode mixture_mode_from_string(std::string_view text);

/// Seed whose default-parameter report is used as the reference run.
inline constexpr std::uint64_t kDefaultSeed = 286;

struct SimulationConfig {
    double alpha = 2.3;
    int vocab_size = 50;
    std::int64_t m_a = 1'000'000;
    std::int64_t m_b = 250'000;
    std::int64_t tokens_per_trajectory = 10'000;
    std::uint64_t seed = kDefaultSeed;
    MixtureMode mode = MixtureMode::Empirical;

    /// Throws std::invalid_argument on alpha <= 1, V < 2, !(M_A > M_B > 0), n < 1.
    void validate() const;
    /// pi = M_A / (M_A + M_B).
    double mixture_weight() const;
};

/// Zipf(alpha) over V tokens; the token at Zipf-rank i (0-based) is perm[i].
struct VocabDistribution {
    std::vector<double> probs;  ///< indexed by token id
    std::vector<int> perm;
};

/// Throws std::invalid_argument if alpha <= 1 or perm is not a permutation of [0, V).
VocabDistribution build_zipf(double alpha, std::span<const int> perm);
std::vector<int> identity_permutation(int n);

/// Student distribution with its rank table. rank[t] = 1 + #{u : probs[u] > probs[t]};
/// `order` lists token ids by descending probability, ties by id. Tokens with
/// zero probability are outside the support.
struct StudentDistribution {
    std::vector<double> probs;
    std::vector<int> rank;
    std::vector<int> order;
    std::vector<std::int64_t> counts;  ///< empirical mode only
};

StudentDistribution make_student(std::vector<double> probs);

/// Empirical mode draws M_A tokens from z_a and M_B from z_b with `rng` and
/// normalizes counts; analytic mode mixes exactly with weight pi.
StudentDistribution build_student_mixture(const SimulationConfig& cfg, const VocabDistribution& z_a,
                                          const VocabDistribution& z_b, Rng& rng);

std::vector<int> sample_trajectory(std::span<const double> probs, std::int64_t n, std::uint64_t seed);

inline constexpr double kProbabilityFloor = 1e-300;

struct TokenEval {
    double prob = 0.0;
    double surprisal = 0.0;
    int rank = 0;
};

/// Per-token probability, surprisal and rank under z. Out-of-support tokens get
/// probability kProbabilityFloor and rank V.
std::vector<TokenEval> evaluate_under_student(std::span<const int> tokens, const StudentDistribution& z);

struct FamilyRow {
    std::string name;
    double mean_prob = 0.0;
    double mean_surprisal = 0.0;
    double mean_rank = 0.0;
    double mean_token_rsr = 0.0;  ///< mean of rank / surprisal, unclipped rank
};

struct SimulationReport {
    SimulationConfig config;
    std::array<FamilyRow, 4> rows;  ///< X_A, X_B, X_C, X_D
    VocabDistribution z_a;
    VocabDistribution z_b;
    VocabDistribution z_c;
    StudentDistribution z;
};

struct SimulationOptions {
    /// Give Z_B the same permutation as Z_A, collapsing the mixture.
    bool identical_components = false;
};

/// Deterministic in (cfg, options); `threads` only changes speed.
SimulationReport run_simulation(const SimulationConfig& cfg, unsigned threads = 1, SimulationOptions options = {});

std::string report_text(const SimulationReport& report);
std::string report_csv(const SimulationReport& report);
/// token_id,probability,rank for every token in id order.
std::string student_csv(const StudentDistribution& z);

} // namespace rsr::sim
