// SPDX-License-Identifier: Apache-2.0
#include "rsr/core/score_table.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <tuple>

#include "rsr/core/csv.hpp"
#include "rsr/core/errors.hpp"

namespace rsr {

std::string_view to_string(Provenance p) {
    return p == Provenance::Computed ? "computed" : "external-fixture";
}

Provenance provenance_from_string(std::string_view text) {
    if (text == "computed") {
        return Provenance::Computed;
    }
    if (text == "external-fixture" || text == "external") {
        return Provenance::ExternalFixture;
    }
    throw InputError("unknown provenance '" + std::string(text) + "'");
}

std::size_t ScoreTable::add_metric(const std::string& name, Provenance provenance) {
    if (auto idx = metric_index(name)) {
        return *idx;
    }
    metrics_.push_back(name);
    provenance_.push_back(provenance);
    for (auto& row : cells_) {
        row.emplace_back();
    }
    return metrics_.size() - 1;
}

std::size_t ScoreTable::add_teacher(const std::string& teacher) {
    if (auto idx = teacher_index(teacher)) {
        return *idx;
    }
    teachers_.push_back(teacher);
    cells_.emplace_back(metrics_.size());
    return teachers_.size() - 1;
}

void ScoreTable::set(const std::string& teacher, const std::string& metric, double value) {
    std::size_t m = add_metric(metric);
    std::size_t t = add_teacher(teacher);
    cells_[t][m] = value;
}

std::optional<double> ScoreTable::get(std::string_view teacher, std::string_view metric) const {
    auto t = teacher_index(teacher);
    auto m = metric_index(metric);
    if (!t || !m) {
        return std::nullopt;
    }
    return cells_[*t][*m];
}

Provenance ScoreTable::provenance(std::string_view metric) const {
    auto m = metric_index(metric);
    return m ? provenance_[*m] : Provenance::Computed;
}

std::optional<std::size_t> ScoreTable::metric_index(std::string_view metric) const {
    auto it = std::find(metrics_.begin(), metrics_.end(), metric);
    if (it == metrics_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - metrics_.begin());
}

std::optional<std::size_t> ScoreTable::teacher_index(std::string_view teacher) const {
    auto it = std::find(teachers_.begin(), teachers_.end(), teacher);
    if (it == teachers_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - teachers_.begin());
}

std::vector<double> ScoreTable::column(std::string_view metric, std::span<const std::string> teachers) const {
    std::vector<double> out;
    std::vector<std::string> missing;
    out.reserve(teachers.size());
    for (const std::string& teacher : teachers) {
        auto v = get(teacher, metric);
        if (!v) {
            missing.push_back(teacher);
            out.push_back(0.0);
        } else {
            out.push_back(*v);
        }
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& t : missing) {
            list += (list.empty() ? "" : ", ") + t;
        }
        throw InputError("missing cells for metric '" + std::string(metric) + "': " + list,
                         "student " + student_id_);
    }
    return out;
}

std::vector<ScoreTable> read_score_tables(std::istream& in, const std::string& source_name) {
    csv::Document doc = csv::read(in, source_name);
    if (doc.header.size() < 3 || doc.header[0] != "student" || doc.header[1] != "teacher") {
        throw InputError("score table header must start with 'student,teacher' and name at least one metric",
                         source_name);
    }
    Provenance provenance = Provenance::Computed;
    for (const std::string& c : doc.comments) {
        constexpr std::string_view key = "provenance:";
        if (c.rfind(key, 0) == 0) {
            std::string_view value(c);
            value.remove_prefix(key.size());
            while (!value.empty() && value.front() == ' ') {
                value.remove_prefix(1);
            }
            provenance = provenance_from_string(value);
        }
    }

    // Sum and count per (student, teacher, metric) to average repeated rows.
    struct Acc {
        double sum = 0.0;
        int count = 0;
    };
    std::vector<ScoreTable> tables;
    std::map<std::string, std::size_t> table_of;
    std::map<std::tuple<std::string, std::string, std::string>, Acc> acc;

    for (std::size_t r = 0; r < doc.rows.size(); ++r) {
        const auto& row = doc.rows[r];
        const std::string loc = source_name + ":" + std::to_string(doc.line_numbers[r]);
        const std::string& student = row[0];
        const std::string& teacher = row[1];
        if (student.empty() || teacher.empty()) {
            throw InputError("empty student or teacher id", loc);
        }
        auto [it, inserted] = table_of.emplace(student, tables.size());
        if (inserted) {
            ScoreTable table(student);
            for (std::size_t c = 2; c < doc.header.size(); ++c) {
                table.add_metric(doc.header[c], provenance);
            }
            tables.push_back(std::move(table));
        }
        tables[it->second].add_teacher(teacher);
        for (std::size_t c = 2; c < row.size(); ++c) {
            if (row[c].empty()) {
                continue;
            }
            double v = csv::parse_real(row[c], loc + " column '" + doc.header[c] + "'");
            Acc& a = acc[{student, teacher, doc.header[c]}];
            a.sum += v;
            ++a.count;
        }
    }
    for (const auto& [key, a] : acc) {
        const auto& [student, teacher, metric] = key;
        tables[table_of[student]].set(teacher, metric, a.sum / a.count);
    }
    return tables;
}

void write_score_tables(std::ostream& out, std::span<const ScoreTable> tables,
                        const std::vector<std::string>& comments) {
    for (const std::string& c : comments) {
        out << "# " << c << '\n';
    }
    if (tables.empty()) {
        out << "student,teacher\n";
        return;
    }
    const auto& metrics = tables.front().metrics();
    std::vector<std::string> header{"student", "teacher"};
    header.insert(header.end(), metrics.begin(), metrics.end());
    out << csv::join(header) << '\n';
    for (const ScoreTable& table : tables) {
        for (const std::string& teacher : table.teachers()) {
            std::vector<std::string> row{table.student_id(), teacher};
            for (const std::string& m : metrics) {
                auto v = table.get(teacher, m);
                row.push_back(v ? csv::format_real(*v) : std::string());
            }
            out << csv::join(row) << '\n';
        }
    }
}

} // namespace rsr
