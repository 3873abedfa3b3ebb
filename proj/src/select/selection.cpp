// SPDX-License-Identifier: Apache-2.0
#include "rsr/select/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "rsr/core/errors.hpp"
#include "rsr/core/parallel.hpp"
#include "rsr/core/random.hpp"

namespace rsr::select {
namespace {

bool key_less(const Candidate& a, const Candidate& b) {
    if (a.teacher_id != b.teacher_id) {
        return a.teacher_id < b.teacher_id;
    }
    return a.rollout_id < b.rollout_id;
}

bool better(const Candidate& a, const Candidate& b, Direction direction) {
    if (a.value != b.value) {
        return direction == Direction::Min ? a.value < b.value : a.value > b.value;
    }
    return key_less(a, b);
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string teacher_of(const TrajectoryDataset& ds) {
    if (!ds.records.empty()) {
        const std::string& first = ds.records.front().teacher_id;
        const bool shared = std::all_of(ds.records.begin(), ds.records.end(),
                                        [&](const TrajectoryRecord& r) { return r.teacher_id == first; });
        if (shared) {
            return first;
        }
    }
    return ds.dataset_id;
}

SelectionManifest run_selection(std::span<const CandidatePool> pools, const metrics::TrajectoryMetric& metric,
                                Direction direction, bool correct_only, unsigned threads) {
    SelectionManifest manifest;
    manifest.metric = metric.name;
    manifest.direction = direction;
    manifest.correctness_filtered = correct_only;

    manifest.choices = parallel_map(pools.size(), threads, [&](std::size_t p) {
        const CandidatePool& pool = pools[p];
        std::vector<Candidate> scored;
        scored.reserve(pool.candidates.size());
        for (const TrajectoryRecord* rec : pool.candidates) {
            Candidate c{rec->teacher_id, rec->rollout_id, 0.0, rec->correct};
            try {
                c.value = metric.evaluate(*rec);
            } catch (const MetricError& e) {
                throw MetricError("pool " + pool.problem_id + ": " + metric.name + " on " + rec->key() + ": " +
                                  e.what());
            }
            if (std::isnan(c.value)) {
                throw MetricError("pool " + pool.problem_id + ": " + metric.name + " is NaN on " + rec->key());
            }
            scored.push_back(std::move(c));
        }
        const std::size_t best = choose(scored, direction, correct_only);
        const bool filtered =
            correct_only && std::any_of(scored.begin(), scored.end(), [](const Candidate& c) { return c.correct == true; });
        return Choice{pool.problem_id, scored[best].teacher_id, scored[best].rollout_id, scored[best].value,
                      scored.size(), filtered};
    });

    std::map<std::string, std::pair<std::size_t, double>> by_teacher;
    for (const Choice& c : manifest.choices) {
        auto& slot = by_teacher[c.teacher_id];
        ++slot.first;
        slot.second += c.value;
    }
    const auto total = static_cast<double>(manifest.choices.size());
    for (const auto& [teacher, slot] : by_teacher) {
        manifest.composition.push_back({teacher, slot.first, 100.0 * static_cast<double>(slot.first) / total,
                                        slot.second / static_cast<double>(slot.first)});
    }
    return manifest;
}

} // namespace

std::vector<CandidatePool> build_pools(std::span<const TrajectoryDataset> datasets) {
    std::map<std::string, CandidatePool> pools;
    for (const TrajectoryDataset& ds : datasets) {
        for (const TrajectoryRecord& r : ds.records) {
            CandidatePool& pool = pools[r.problem_id];
            pool.problem_id = r.problem_id;
            pool.candidates.push_back(&r);
        }
    }
    std::vector<CandidatePool> out;
    out.reserve(pools.size());
    for (auto& [id, pool] : pools) {
        out.push_back(std::move(pool));
    }
    return out;
}

std::size_t choose(std::span<const Candidate> pool, Direction direction, bool correct_only) {
    if (pool.empty()) {
        throw std::invalid_argument("empty candidate pool");
    }
    const bool restrict =
        correct_only && std::any_of(pool.begin(), pool.end(), [](const Candidate& c) { return c.correct == true; });
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (std::isnan(pool[i].value)) {
            throw std::invalid_argument("NaN metric value in pool");
        }
        if (restrict && pool[i].correct != true) {
            continue;
        }
        if (!best || better(pool[i], pool[*best], direction)) {
            best = i;
        }
    }
    return *best;
}

SelectionManifest select_trajectories(std::span<const CandidatePool> pools, const metrics::TrajectoryMetric& metric,
                                      Direction direction, unsigned threads) {
    return run_selection(pools, metric, direction, false, threads);
}

SelectionManifest correctness_filtered_select(std::span<const CandidatePool> pools,
                                              const metrics::TrajectoryMetric& metric, Direction direction,
                                              unsigned threads) {
    return run_selection(pools, metric, direction, true, threads);
}

TrajectoryDataset sample_for_teacher(const TrajectoryDataset& ds, std::size_t n, std::uint64_t seed) {
    const std::size_t size = ds.records.size();
    if (n > size) {
        throw std::invalid_argument("sample size " + std::to_string(n) + " exceeds dataset size " +
                                    std::to_string(size) + " for " + ds.dataset_id);
    }
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(size - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    std::sort(idx.begin(), idx.end());

    TrajectoryDataset out;
    out.dataset_id = ds.dataset_id;
    out.student_id = ds.student_id;
    out.k_ext = ds.k_ext;
    out.records.reserve(n);
    for (std::size_t i : idx) {
        out.records.push_back(ds.records[i]);
    }
    return out;
}

std::vector<RankedTeacher> rank_teachers(std::span<const TeacherScore> scores, Direction direction) {
    std::vector<TeacherScore> sorted(scores.begin(), scores.end());
    for (const TeacherScore& s : sorted) {
        if (std::isnan(s.score)) {
            throw std::invalid_argument("NaN score for teacher " + s.teacher_id);
        }
    }
    std::sort(sorted.begin(), sorted.end(), [&](const TeacherScore& a, const TeacherScore& b) {
        if (a.score != b.score) {
            return direction == Direction::Min ? a.score < b.score : a.score > b.score;
        }
        return a.teacher_id < b.teacher_id;
    });
    std::vector<RankedTeacher> out;
    out.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        out.push_back({i + 1, sorted[i].teacher_id, sorted[i].score, i == 0, i == 1});
    }
    return out;
}

std::vector<TeacherScore> score_teachers(std::span<const TrajectoryDataset> datasets,
                                         const metrics::TrajectoryMetric& metric, std::size_t sample_size,
                                         std::uint64_t seed, unsigned threads) {
    return parallel_map(datasets.size(), threads, [&](std::size_t i) {
        const TrajectoryDataset& ds = datasets[i];
        const std::string teacher = teacher_of(ds);
        TrajectoryDataset sampled;
        const TrajectoryDataset* used = &ds;
        if (sample_size > 0) {
            sampled = sample_for_teacher(ds, sample_size, mix_seed(seed, fnv1a(teacher)));
            used = &sampled;
        }
        try {
            return TeacherScore{teacher, metrics::dataset_score(used->records, metric)};
        } catch (const MetricError& e) {
            throw MetricError("teacher " + teacher + ": " + e.what());
        }
    });
}

} // namespace rsr::select
