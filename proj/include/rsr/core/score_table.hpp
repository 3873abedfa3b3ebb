// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rsr {

enum class Provenance { Computed, ExternalFixture };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view text);

/// Dataset-level metric values for one student: rows are teacher datasets,
/// columns are metrics. Missing cells are empty optionals.
class ScoreTable {
public:
    explicit ScoreTable(std::string student_id = {}) : student_id_(std::move(student_id)) {}

    const std::string& student_id() const noexcept { return student_id_; }
    const std::vector<std::string>& teachers() const noexcept { return teachers_; }
    const std::vector<std::string>& metrics() const noexcept { return metrics_; }

    /// Adds the column if new; returns its index.
    std::size_t add_metric(const std::string& name, Provenance provenance = Provenance::Computed);
    /// Adds the row if new; returns its index.
    std::size_t add_teacher(const std::string& teacher);

    void set(const std::string& teacher, const std::string& metric, double value);
    std::optional<double> get(std::string_view teacher, std::string_view metric) const;
    Provenance provenance(std::string_view metric) const;

    std::optional<std::size_t> metric_index(std::string_view metric) const;
    std::optional<std::size_t> teacher_index(std::string_view teacher) const;

    /// Values of `metric` for `teachers`, in that order. Throws InputError
    /// listing every missing cell.
    std::vector<double> column(std::string_view metric, std::span<const std::string> teachers) const;

private:
    std::string student_id_;
    std::vector<std::string> teachers_;
    std::vector<std::string> metrics_;
    std::vector<Provenance> provenance_;
    std::vector<std::vector<std::optional<double>>> cells_;  // [teacher][metric]
};

/// Reads the wide score format: `student,teacher,<metric>...`. A comment line
/// "provenance: external-fixture" marks every column as external. Rows that
/// repeat a (student, teacher) pair, such as one row per rollout dataset, are
/// averaged cell-wise in file order.
std::vector<ScoreTable> read_score_tables(std::istream& in, const std::string& source_name);

/// Writes the wide score format. Every table must share the metric list of the first.
void write_score_tables(std::ostream& out, std::span<const ScoreTable> tables,
                        const std::vector<std::string>& comments = {});

} // namespace rsr
