// SPDX-License-Identifier: Apache-2.0
#include "rsr/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "rsr/cli/report.hpp"
#include "rsr/core/errors.hpp"
#include "rsr/core/score_table.hpp"
#include "rsr/core/token_stats_io.hpp"
#include "rsr/corr/correlation.hpp"
#include "rsr/metrics/registry.hpp"
#include "rsr/quality/quality.hpp"
#include "rsr/select/selection.hpp"
#include "rsr/sim/simulation.hpp"

namespace fs = std::filesystem;

namespace rsr::cli {
namespace {

struct Output {
    std::string name;
    std::string content;
};

/// Writes every output into cfg.out, or the first one to `out` when no
/// directory is configured.
void emit(const RunConfig& cfg, const std::vector<Output>& outputs, std::ostream& out) {
    if (cfg.out.empty()) {
        out << outputs.front().content;
        return;
    }
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) {
        throw InputError("cannot create output directory: " + ec.message(), cfg.out);
    }
    for (const Output& o : outputs) {
        const fs::path path = fs::path(cfg.out) / o.name;
        std::ofstream file(path, std::ios::binary);
        file << o.content;
        if (!file) {
            throw InputError("cannot write output file", path.string());
        }
    }
}

std::vector<TrajectoryDataset> load_inputs(const RunConfig& cfg) {
    if (cfg.inputs.empty()) {
        throw InputError("no --input given");
    }
    std::vector<TrajectoryDataset> datasets;
    datasets.reserve(cfg.inputs.size());
    for (const std::string& path : cfg.inputs) {
        datasets.push_back(load_dataset(path));
    }
    return datasets;
}

metrics::MetricParams metric_params(const RunConfig& cfg) {
    metrics::MetricParams p;
    p.clip = metrics::ClipThreshold(cfg.r_max);
    p.filter_percent = cfg.filter_h;
    p.power = {cfg.power_rank, cfg.power_surprisal};
    return p;
}

void require_cap(const std::vector<TrajectoryDataset>& datasets, std::int64_t r_max) {
    for (const TrajectoryDataset& ds : datasets) {
        if (ds.k_ext < r_max) {
            throw InputError(std::string(kCapBelowClip) + " (k_ext " + std::to_string(ds.k_ext) + " < r_max " +
                                 std::to_string(r_max) + ")",
                             "dataset " + ds.dataset_id);
        }
    }
}

metrics::TrajectoryMetric metric_or_input_error(const std::string& name, const metrics::MetricParams& params) {
    try {
        return metrics::make_metric(name, params);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

metrics::Direction resolve_direction(RunConfig& cfg, std::optional<metrics::Direction> preferred) {
    if (!cfg.direction) {
        if (!preferred) {
            throw InputError("--direction is required for metric '" + cfg.metrics.front() + "'");
        }
        cfg.direction = std::string(metrics::to_string(*preferred));
    }
    try {
        return metrics::direction_from_string(*cfg.direction);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

int cmd_validate(RunConfig& cfg, std::ostream& out) {
    if (cfg.inputs.empty()) {
        throw InputError("no --input given");
    }
    std::string body = comment_header(cfg);
    bool ok = true;
    for (const std::string& path : cfg.inputs) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw InputError("cannot open input", path);
        }
        ValidationReport report = validate_stream(in, path, cfg.r_max);
        const fs::path manifest = manifest_path_for(path);
        if (fs::exists(manifest)) {
            try {
                DatasetManifest m = read_manifest(manifest);
                if (m.k_ext < cfg.r_max) {
                    report.violations.push_back({manifest.string(), std::string(kCapBelowClip)});
                }
            } catch (const InputError& e) {
                report.violations.push_back({e.location(), e.message()});
            }
        }
        ok = ok && report.ok();
        body += validation_text(path, report);
    }
    emit(cfg, {{"validation.txt", body}}, out);
    return ok ? kOk : kInputError;
}

int cmd_score(RunConfig& cfg, std::ostream& out) {
    if (cfg.metrics.empty()) {
        cfg.metrics = {"rsr"};
    }
    const auto params = metric_params(cfg);
    std::vector<metrics::TrajectoryMetric> ms;
    for (const auto& name : cfg.metrics) {
        ms.push_back(metric_or_input_error(name, params));
    }
    const auto datasets = load_inputs(cfg);
    require_cap(datasets, cfg.r_max);

    std::vector<DatasetScores> scores;
    for (const TrajectoryDataset& ds : datasets) {
        DatasetScores d;
        d.dataset = &ds;
        for (const auto& m : ms) {
            auto values = metrics::evaluate_records(ds.records, m, cfg.threads);
            double aggregate = 0.0;
            if (m.aggregation == metrics::Aggregation::SurprisalWeighted) {
                aggregate = metrics::dataset_rsr(ds.records, m.clip);
            } else {
                if (values.empty()) {
                    throw MetricError("dataset mean of an empty dataset " + ds.dataset_id);
                }
                for (double v : values) {
                    aggregate += v;
                }
                aggregate /= static_cast<double>(values.size());
            }
            d.per_record.push_back(std::move(values));
            d.aggregate.push_back(aggregate);
        }
        scores.push_back(std::move(d));
    }
    emit(cfg,
         {{"scores.csv", scores_csv(cfg, cfg.metrics, scores)}, {"scores.jsonl", scores_jsonl(cfg, cfg.metrics, scores)}},
         out);
    return kOk;
}

int cmd_quality(RunConfig& cfg, std::ostream& out) {
    const auto datasets = load_inputs(cfg);
    std::vector<QualityRun> runs;
    for (const TrajectoryDataset& ds : datasets) {
        runs.push_back({&ds, quality::rule_based_quality(ds, {}, cfg.threads)});
    }
    emit(cfg, {{"quality.csv", quality_csv(cfg, runs)}}, out);
    return kOk;
}

int cmd_select_traj(RunConfig& cfg, std::ostream& out) {
    if (cfg.metrics.empty()) {
        cfg.metrics = {"rsr"};
    }
    if (cfg.metrics.size() != 1) {
        throw InputError("select-traj takes exactly one --metric");
    }
    const auto metric = metric_or_input_error(cfg.metrics.front(), metric_params(cfg));
    const auto direction = resolve_direction(cfg, metric.preferred);
    const auto datasets = load_inputs(cfg);
    require_cap(datasets, cfg.r_max);
    const auto pools = select::build_pools(datasets);
    const auto manifest = cfg.correctness_filter
                              ? select::correctness_filtered_select(pools, metric, direction, cfg.threads)
                              : select::select_trajectories(pools, metric, direction, cfg.threads);
    emit(cfg,
         {{"composition.txt", composition_text(cfg, manifest)}, {"manifest.jsonl", manifest_jsonl(cfg, manifest)}},
         out);
    return kOk;
}

int cmd_select_teacher(RunConfig& cfg, std::ostream& out) {
    if (cfg.metrics.empty()) {
        cfg.metrics = {"rsr"};
    }
    if (cfg.metrics.size() != 1) {
        throw InputError("select-teacher takes exactly one --metric");
    }
    const std::string& name = cfg.metrics.front();
    std::vector<select::TeacherScore> scores;
    if (!cfg.scores.empty()) {
        if (!cfg.inputs.empty()) {
            throw InputError("give either --scores or --input, not both");
        }
        if (cfg.student.empty()) {
            throw InputError("--student is required with --scores");
        }
        std::optional<metrics::Direction> preferred;
        try {
            preferred = metrics::make_metric(name).preferred;
        } catch (const std::invalid_argument&) {
        }
        resolve_direction(cfg, preferred);
        std::ifstream in(cfg.scores, std::ios::binary);
        if (!in) {
            throw InputError("cannot open score table", cfg.scores);
        }
        const auto tables = read_score_tables(in, cfg.scores);
        const ScoreTable* table = nullptr;
        for (const auto& t : tables) {
            if (t.student_id() == cfg.student) {
                table = &t;
            }
        }
        if (!table) {
            throw InputError("no rows for student '" + cfg.student + "'", cfg.scores);
        }
        const std::vector<std::string> teachers = cfg.teachers.empty() ? table->teachers() : cfg.teachers;
        if (!table->metric_index(name)) {
            throw InputError("no column '" + name + "'", cfg.scores);
        }
        const auto values = table->column(name, teachers);
        for (std::size_t i = 0; i < teachers.size(); ++i) {
            scores.push_back({teachers[i], values[i]});
        }
    } else {
        const auto metric = metric_or_input_error(name, metric_params(cfg));
        resolve_direction(cfg, metric.preferred);
        if (!cfg.seed) {
            cfg.seed = 0;
        }
        const auto datasets = load_inputs(cfg);
        require_cap(datasets, cfg.r_max);
        try {
            scores = select::score_teachers(datasets, metric, cfg.n_sample, *cfg.seed, cfg.threads);
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
    }
    if (scores.empty()) {
        throw InputError("no teachers to rank");
    }
    const auto direction = metrics::direction_from_string(*cfg.direction);
    const auto ranked = select::rank_teachers(scores, direction);
    emit(cfg, {{"teachers.txt", teachers_text(cfg, name, ranked)}, {"teachers.csv", teachers_csv(cfg, ranked)}}, out);
    return kOk;
}

int cmd_simulate(RunConfig& cfg, std::ostream& out) {
    sim::SimulationConfig sc;
    sc.alpha = cfg.alpha;
    sc.vocab_size = cfg.vocab_size;
    sc.m_a = cfg.m_a;
    sc.m_b = cfg.m_b;
    sc.tokens_per_trajectory = cfg.tokens_per_trajectory;
    if (!cfg.seed) {
        cfg.seed = sim::kDefaultSeed;
    }
    sc.seed = *cfg.seed;
    try {
        sc.mode = sim::mixture_mode_from_string(cfg.mixture_mode);
        sc.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    const auto report = sim::run_simulation(sc, cfg.threads);
    const std::string header = comment_header(cfg);
    emit(cfg,
         {{"simulation.txt", header + sim::report_text(report)},
          {"simulation.csv", header + sim::report_csv(report)},
          {"student_z.csv", header + sim::student_csv(report.z)}},
         out);
    return kOk;
}

int cmd_correlate(RunConfig& cfg, std::ostream& out) {
    if (cfg.scores.empty()) {
        cfg.scores = default_fixture_dir() + "/metric_scores.csv";
    }
    if (cfg.performance.empty()) {
        cfg.performance = default_fixture_dir() + "/performance.csv";
    }
    std::ifstream scores_in(cfg.scores, std::ios::binary);
    if (!scores_in) {
        throw InputError("cannot open score table", cfg.scores);
    }
    std::ifstream perf_in(cfg.performance, std::ios::binary);
    if (!perf_in) {
        throw InputError("cannot open performance table", cfg.performance);
    }
    const auto tables = read_score_tables(scores_in, cfg.scores);
    const auto perf = corr::read_performance(perf_in, cfg.performance);
    if (cfg.metrics.empty() && !tables.empty()) {
        cfg.metrics = tables.front().metrics();
    }
    const auto report = corr::correlate_table(tables, perf, cfg.metrics, cfg.threads);
    const std::string header = comment_header(cfg, {"per-student cells are absolute values; Average is |mean of "
                                                    "signed coefficients|"});
    emit(cfg,
         {{"correlation.txt", header + corr::report_text(report)},
          {"correlation.csv", comment_header(cfg) + corr::report_csv(report)}},
         out);
    return kOk;
}

void add_common(CLI::App* sub, RunConfig& cfg, std::string& config_path) {
    sub->add_option("--out", cfg.out, "Output directory (default: main report to stdout)");
    sub->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--config", config_path, "JSON config; its keys override flags");
}

void add_inputs(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--input", cfg.inputs, "Token-stats file (repeatable)");
}

void add_metric_options(CLI::App* sub, RunConfig& cfg, std::string& direction) {
    sub->add_option("--metric", cfg.metrics, "Metric name (repeatable for score)");
    sub->add_option("--direction", direction, "min or max (default: the metric's preferred direction)");
    sub->add_option("--r-max", cfg.r_max, "Rank clipping threshold");
    sub->add_option("--filter-h", cfg.filter_h, "Percent of highest-surprisal tokens kept by the filtered average");
    sub->add_option("--power-rank", cfg.power_rank, "Rank exponent for power_rsr");
    sub->add_option("--power-surprisal", cfg.power_surprisal, "Surprisal exponent for power_rsr");
}

} // namespace

int run_command(RunConfig cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.threads < 1) {
            throw InputError("--threads must be >= 1");
        }
        if (cfg.command == "validate") {
            return cmd_validate(cfg, out);
        }
        if (cfg.command == "score") {
            return cmd_score(cfg, out);
        }
        if (cfg.command == "quality") {
            return cmd_quality(cfg, out);
        }
        if (cfg.command == "select-traj") {
            return cmd_select_traj(cfg, out);
        }
        if (cfg.command == "select-teacher") {
            return cmd_select_teacher(cfg, out);
        }
        if (cfg.command == "simulate") {
            return cmd_simulate(cfg, out);
        }
        if (cfg.command == "correlate") {
            return cmd_correlate(cfg, out);
        }
        throw InputError("unknown command '" + cfg.command + "'");
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const MetricError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rank-surprisal ratio toolkit", "rsr"};
    app.set_version_flag("--version", std::string(tool_version()));
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::string direction;

    auto* validate = app.add_subcommand("validate", "Check token-stats files and report violations");
    add_inputs(validate, cfg);
    add_common(validate, cfg, config_path);
    validate->add_option("--r-max", cfg.r_max, "Rank clipping threshold the data must support");

    auto* score = app.add_subcommand("score", "Per-trajectory and dataset-level metric values");
    add_inputs(score, cfg);
    add_common(score, cfg, config_path);
    add_metric_options(score, cfg, direction);

    auto* quality = app.add_subcommand("quality", "Rule-based quality scores from trajectory text");
    add_inputs(quality, cfg);
    add_common(quality, cfg, config_path);

    auto* select_traj = app.add_subcommand("select-traj", "Pick one trajectory per problem");
    add_inputs(select_traj, cfg);
    add_common(select_traj, cfg, config_path);
    add_metric_options(select_traj, cfg, direction);
    select_traj->add_flag("--correctness-filter", cfg.correctness_filter,
                          "Prefer correct candidates when a pool has any");

    auto* select_teacher = app.add_subcommand("select-teacher", "Rank teachers by a dataset-level score");
    add_inputs(select_teacher, cfg);
    add_common(select_teacher, cfg, config_path);
    add_metric_options(select_teacher, cfg, direction);
    select_teacher->add_option("--n-sample", cfg.n_sample, "Records sampled per teacher (0 = all)");
    select_teacher->add_option("--seed", cfg.seed, "Sampling seed (default 0)");
    select_teacher->add_option("--scores", cfg.scores, "Rank from a score table instead of token-stats inputs");
    select_teacher->add_option("--student", cfg.student, "Student whose score rows are ranked");
    select_teacher->add_option("--teachers", cfg.teachers, "Teacher subset (default: all rows)")->delimiter(',');

    auto* simulate = app.add_subcommand("simulate", "Zipf-mixture simulation of four trajectory families");
    add_common(simulate, cfg, config_path);
    simulate->add_option("--seed", cfg.seed, "Simulation seed (default: the pinned reference seed)");
    simulate->add_option("--alpha", cfg.alpha, "Zipf exponent");
    simulate->add_option("--vocab-size", cfg.vocab_size, "Vocabulary size");
    simulate->add_option("--m-a", cfg.m_a, "Draws from the dominant mode");
    simulate->add_option("--m-b", cfg.m_b, "Draws from the secondary mode");
    simulate->add_option("--tokens", cfg.tokens_per_trajectory, "Tokens per simulated trajectory");
    simulate->add_option("--mixture-mode", cfg.mixture_mode, "empirical or analytic");

    auto* correlate = app.add_subcommand("correlate", "Correlate metric columns with post-training performance");
    add_common(correlate, cfg, config_path);
    correlate->add_option("--scores", cfg.scores, "Wide score CSV (default: shipped fixture)");
    correlate->add_option("--performance", cfg.performance, "Performance CSV (default: shipped fixture)");
    correlate->add_option("--metric", cfg.metrics, "Metric columns (default: all)");

    std::vector<const char*> argv{"rsr"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    if (!direction.empty()) {
        cfg.direction = direction;
    }
    if (!config_path.empty()) {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) {
            err << "error: " << config_path << ": cannot open config\n";
            return kInputError;
        }
        try {
            apply_json(cfg, nlohmann::json::parse(in), config_path);
        } catch (const nlohmann::json::parse_error& e) {
            err << "error: " << config_path << ": " << e.what() << '\n';
            return kInputError;
        } catch (const InputError& e) {
            err << "error: " << e.what() << '\n';
            return kInputError;
        }
    }
    return run_command(std::move(cfg), out, err);
}

} // namespace rsr::cli
