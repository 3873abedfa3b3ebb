// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsr/core/types.hpp"

namespace rsr {

inline constexpr std::string_view kSchemaVersion = "1";
inline constexpr std::string_view kSurprisalUnit = "nats";

/// Sidecar describing a token-stats file (`<file>.manifest.json`).
struct DatasetManifest {
    std::string dataset_id;
    std::string student_id;
    std::string surprisal_unit{kSurprisalUnit};
    std::int64_t k_ext = kDefaultExtractionCap;
    /// Free-form extractor settings (window size, template, ...), echoed verbatim.
    std::map<std::string, std::string> extraction;

    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// Parses one line of the token-stats format. Throws InputError tagged with
/// `location`, naming the offending field.
TrajectoryRecord parse_record_line(std::string_view line, const std::string& location);

/// Canonical single-line encoding of a record (no trailing newline). Parsing the
/// output and serializing again yields the same bytes.
std::string serialize_record(const TrajectoryRecord& record);

/// Streaming reader: holds one record at a time. Blank lines are skipped;
/// errors carry "<source>:<line>".
class TokenStatReader {
public:
    TokenStatReader(std::istream& in, std::string source_name);

    /// Next record, or nullopt at end of input. Throws InputError on a bad line.
    std::optional<TrajectoryRecord> next();

    std::size_t line_number() const noexcept { return line_no_; }
    const std::string& source_name() const noexcept { return source_; }

private:
    std::istream& in_;
    std::string source_;
    std::string buffer_;
    std::size_t line_no_ = 0;
};

/// Reads a whole token-stats stream into a dataset, enforcing unique
/// (problem, teacher, rollout) keys and a single extraction cap. The manifest,
/// when given, supplies ids and must agree with the records' cap.
TrajectoryDataset parse_token_stats(std::istream& in, const std::string& source_name,
                                    const std::optional<DatasetManifest>& manifest = std::nullopt);

void write_token_stats(std::ostream& out, const TrajectoryDataset& dataset);

std::filesystem::path manifest_path_for(const std::filesystem::path& stats_path);
DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

/// Loads `path` plus its sidecar manifest if present. Without a manifest the
/// dataset id is the file stem and the student id is "unknown".
TrajectoryDataset load_dataset(const std::filesystem::path& path);

/// Writes `<path>` and its sidecar manifest.
void save_dataset(const std::filesystem::path& path, const TrajectoryDataset& dataset,
                  std::map<std::string, std::string> extraction = {});

} // namespace rsr
