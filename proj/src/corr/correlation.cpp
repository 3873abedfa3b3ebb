// SPDX-License-Identifier: Apache-2.0
#include "rsr/corr/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rsr/core/csv.hpp"
#include "rsr/core/errors.hpp"
#include "rsr/core/parallel.hpp"

namespace rsr::corr {
namespace {

void check_pair(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw std::invalid_argument("length mismatch: " + std::to_string(xs.size()) + " vs " +
                                    std::to_string(ys.size()));
    }
    if (xs.size() < 3) {
        throw std::invalid_argument("correlation needs at least 3 points");
    }
    auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    };
    if (constant(xs) || constant(ys)) {
        throw std::invalid_argument("constant vector");
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
            throw std::invalid_argument("non-finite value");
        }
    }
}

double product_moment(std::span<const double> xs, std::span<const double> ys) {
    const auto n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

std::vector<double> ranks_by(std::size_t n, const auto& less, const auto& equal) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), less);
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && equal(order[i], order[j])) {
            ++j;
        }
        // Positions i..j-1 (0-based) share the mean 1-based position.
        const double mean = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            ranks[order[k]] = mean;
        }
        i = j;
    }
    return ranks;
}

std::string fmt(double v, const char* spec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

} // namespace

std::vector<double> average_ranks(std::span<const double> xs) {
    return ranks_by(
        xs.size(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; },
        [&](std::size_t a, std::size_t b) { return xs[a] == xs[b]; });
}

std::vector<double> average_ranks(std::span<const double> xs, std::span<const std::int64_t> tie_order) {
    if (tie_order.size() != xs.size()) {
        throw std::invalid_argument("tie order length mismatch");
    }
    return ranks_by(
        xs.size(),
        [&](std::size_t a, std::size_t b) {
            return xs[a] != xs[b] ? xs[a] < xs[b] : tie_order[a] < tie_order[b];
        },
        [&](std::size_t a, std::size_t b) { return xs[a] == xs[b] && tie_order[a] == tie_order[b]; });
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    check_pair(xs, ys);
    return product_moment(xs, ys);
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
    check_pair(xs, ys);
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    return product_moment(rx, ry);
}

double spearman(std::span<const double> xs, std::span<const double> ys, std::span<const std::int64_t> ys_tie_order) {
    check_pair(xs, ys);
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys, ys_tie_order);
    return product_moment(rx, ry);
}

std::vector<std::string> StudentPerformance::teachers() const {
    std::vector<std::string> out;
    for (const auto& e : entries) {
        out.push_back(e.teacher);
    }
    return out;
}

std::vector<double> StudentPerformance::scores() const {
    std::vector<double> out;
    for (const auto& e : entries) {
        out.push_back(e.score);
    }
    return out;
}

std::vector<std::int64_t> StudentPerformance::tie_orders() const {
    std::vector<std::int64_t> out;
    for (const auto& e : entries) {
        out.push_back(e.tie_order);
    }
    return out;
}

PerformanceTable read_performance(std::istream& in, const std::string& source_name) {
    csv::Document doc = csv::read(in, source_name);
    const auto& h = doc.header;
    const bool has_tie = h.size() == 4 && h[3] == "tie_order";
    if (h.size() < 3 || h[0] != "student" || h[1] != "teacher" || h[2] != "score" || (h.size() == 4 && !has_tie) ||
        h.size() > 4) {
        throw InputError("performance header must be 'student,teacher,score[,tie_order]'", source_name);
    }
    PerformanceTable table;
    std::map<std::string, std::size_t> index;
    for (std::size_t r = 0; r < doc.rows.size(); ++r) {
        const auto& row = doc.rows[r];
        const std::string loc = source_name + ":" + std::to_string(doc.line_numbers[r]);
        if (row[0].empty() || row[1].empty()) {
            throw InputError("empty student or teacher id", loc);
        }
        PerformanceEntry e{row[1], csv::parse_real(row[2], loc), 0};
        if (has_tie && !row[3].empty()) {
            const double t = csv::parse_real(row[3], loc);
            if (t != std::floor(t)) {
                throw InputError("tie_order must be an integer", loc);
            }
            e.tie_order = static_cast<std::int64_t>(t);
        }
        auto [it, inserted] = index.emplace(row[0], table.size());
        if (inserted) {
            table.push_back({row[0], {}});
        }
        auto& entries = table[it->second].entries;
        if (std::any_of(entries.begin(), entries.end(), [&](const auto& x) { return x.teacher == e.teacher; })) {
            throw InputError("duplicate performance row for " + row[0] + "/" + row[1], loc);
        }
        entries.push_back(std::move(e));
    }
    return table;
}

const StudentPerformance* find_student(const PerformanceTable& perf, const std::string& student) {
    for (const auto& s : perf) {
        if (s.student == student) {
            return &s;
        }
    }
    return nullptr;
}

std::size_t CorrelationReport::metric_index(const std::string& metric) const {
    auto it = std::find(metrics.begin(), metrics.end(), metric);
    if (it == metrics.end()) {
        throw std::out_of_range("metric not in report: " + metric);
    }
    return static_cast<std::size_t>(it - metrics.begin());
}

std::size_t CorrelationReport::student_index(const std::string& student) const {
    auto it = std::find(students.begin(), students.end(), student);
    if (it == students.end()) {
        throw std::out_of_range("student not in report: " + student);
    }
    return static_cast<std::size_t>(it - students.begin());
}

CorrelationReport correlate_table(std::span<const ScoreTable> tables, const PerformanceTable& perf,
                                  std::span<const std::string> metrics, unsigned threads) {
    if (tables.empty()) {
        throw InputError("no score tables");
    }
    CorrelationReport report;
    if (metrics.empty()) {
        report.metrics = tables.front().metrics();
    } else {
        report.metrics.assign(metrics.begin(), metrics.end());
    }
    std::vector<const StudentPerformance*> per_student;
    for (const ScoreTable& t : tables) {
        const StudentPerformance* p = find_student(perf, t.student_id());
        if (!p) {
            throw InputError("no performance rows for student " + t.student_id());
        }
        report.students.push_back(t.student_id());
        per_student.push_back(p);
    }

    const std::size_t ns = tables.size();
    report.cells = parallel_map(report.metrics.size() * ns, threads, [&](std::size_t i) {
        const std::size_t m = i / ns;
        const std::size_t s = i % ns;
        const StudentPerformance& p = *per_student[s];
        const auto teachers = p.teachers();
        const auto xs = tables[s].column(report.metrics[m], teachers);
        const auto ys = p.scores();
        const auto ties = p.tie_orders();
        CorrelationCell cell{report.students[s], report.metrics[m], 0.0, 0.0, xs.size()};
        try {
            cell.spearman = spearman(xs, ys, ties);
            cell.pearson = pearson(xs, ys);
        } catch (const std::invalid_argument& e) {
            throw InputError(std::string("cannot correlate: ") + e.what(),
                             "student " + cell.student + ", metric " + cell.metric);
        }
        return cell;
    });

    for (std::size_t m = 0; m < report.metrics.size(); ++m) {
        double sp = 0.0;
        double pe = 0.0;
        for (std::size_t s = 0; s < ns; ++s) {
            sp += report.cell(m, s).spearman;
            pe += report.cell(m, s).pearson;
        }
        const auto n = static_cast<double>(ns);
        report.aggregates.push_back({report.metrics[m], std::abs(sp / n), std::abs(pe / n)});
    }
    return report;
}

std::string report_csv(const CorrelationReport& report) {
    std::ostringstream out;
    out << "metric,student,spearman,pearson,n\n";
    for (std::size_t m = 0; m < report.metrics.size(); ++m) {
        for (std::size_t s = 0; s < report.students.size(); ++s) {
            const CorrelationCell& c = report.cell(m, s);
            out << csv::escape(c.metric) << ',' << csv::escape(c.student) << ',' << csv::format_real(c.spearman)
                << ',' << csv::format_real(c.pearson) << ',' << c.n << '\n';
        }
        const MetricAggregate& a = report.aggregates[m];
        out << csv::escape(a.metric) << ",average_abs," << csv::format_real(a.spearman) << ','
            << csv::format_real(a.pearson) << ',' << report.students.size() << '\n';
    }
    return out.str();
}

std::string report_text(const CorrelationReport& report) {
    std::size_t label = std::string("metric").size();
    for (const auto& m : report.metrics) {
        label = std::max(label, m.size());
    }
    std::vector<std::size_t> widths;
    for (const auto& s : report.students) {
        widths.push_back(std::max<std::size_t>(s.size(), 6));
    }
    auto pad = [](const std::string& s, std::size_t w, bool left) {
        const std::string fill(w > s.size() ? w - s.size() : 0, ' ');
        return left ? s + fill : fill + s;
    };
    std::ostringstream out;
    for (int block = 0; block < 2; ++block) {
        out << (block == 0 ? "Spearman |rho|\n" : "\nPearson |r|\n");
        out << pad("metric", label, true);
        for (std::size_t s = 0; s < report.students.size(); ++s) {
            out << "  " << pad(report.students[s], widths[s], false);
        }
        out << "  " << "Average" << '\n';
        for (std::size_t m = 0; m < report.metrics.size(); ++m) {
            out << pad(report.metrics[m], label, true);
            for (std::size_t s = 0; s < report.students.size(); ++s) {
                const CorrelationCell& c = report.cell(m, s);
                const double v = std::abs(block == 0 ? c.spearman : c.pearson);
                out << "  " << pad(fmt(v, "%.3f"), widths[s], false);
            }
            const MetricAggregate& a = report.aggregates[m];
            out << "  " << pad(fmt(block == 0 ? a.spearman : a.pearson, "%.3f"), 7, false) << '\n';
        }
    }
    return out.str();
}

} // namespace rsr::corr
