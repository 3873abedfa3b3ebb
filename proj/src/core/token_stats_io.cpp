// SPDX-License-Identifier: Apache-2.0
#include "rsr/core/token_stats_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

#include <json.hpp>

#include "rsr/core/errors.hpp"

namespace rsr {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& location, const std::string& message) {
    throw InputError(message, location);
}

const json& require(const json& obj, const char* field, const std::string& loc) {
    auto it = obj.find(field);
    if (it == obj.end()) {
        fail(loc, std::string("missing field '") + field + "'");
    }
    return *it;
}

std::string as_string(const json& v, const std::string& field, const std::string& loc) {
    if (!v.is_string()) {
        fail(loc, "field '" + field + "' must be a string");
    }
    return v.get<std::string>();
}

std::int64_t as_integer(const json& v, const std::string& field, const std::string& loc) {
    if (v.is_number_integer()) {
        return v.get<std::int64_t>();
    }
    if (v.is_number_float()) {
        double d = v.get<double>();
        if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.0e15) {
            return static_cast<std::int64_t>(d);
        }
    }
    fail(loc, "field '" + field + "' must be an integer");
}

double as_real(const json& v, const std::string& field, const std::string& loc) {
    if (!v.is_number()) {
        fail(loc, "field '" + field + "' must be a number");
    }
    double d = v.get<double>();
    if (!std::isfinite(d)) {
        fail(loc, "field '" + field + "' must be finite");
    }
    return d;
}

double as_nonnegative(const json& v, const std::string& field, const std::string& loc) {
    double d = as_real(v, field, loc);
    if (d < 0.0) {
        fail(loc, "field '" + field + "' must be non-negative (got " + v.dump() + ")");
    }
    return d;
}

TokenStat parse_token(const json& t, std::size_t index, std::int64_t k_ext, const std::string& loc) {
    const std::string prefix = "tokens[" + std::to_string(index) + "].";
    if (!t.is_object()) {
        fail(loc, "tokens[" + std::to_string(index) + "] must be an object");
    }
    TokenStat tok;
    tok.surprisal = as_nonnegative(require(t, "s", loc), prefix + "s", loc);
    tok.rank = as_integer(require(t, "r", loc), prefix + "r", loc);
    if (tok.rank < 1) {
        fail(loc, "field '" + prefix + "r' must be >= 1 (got " + std::to_string(tok.rank) + ")");
    }
    const json& rs = require(t, "rs", loc);
    if (!rs.is_boolean()) {
        fail(loc, "field '" + prefix + "rs' must be a boolean");
    }
    tok.rank_saturated = rs.get<bool>();
    if (tok.rank > k_ext) {
        fail(loc, "field '" + prefix + "r' exceeds k_ext " + std::to_string(k_ext));
    }
    if (tok.rank_saturated && tok.rank != k_ext) {
        fail(loc, "field '" + prefix + "rs' is set but rank " + std::to_string(tok.rank) +
                      " differs from k_ext " + std::to_string(k_ext));
    }
    if (auto it = t.find("ls"); it != t.end() && !it->is_null()) {
        tok.local_surprisal = as_nonnegative(*it, prefix + "ls", loc);
    }
    if (auto it = t.find("h"); it != t.end() && !it->is_null()) {
        tok.entropy = as_nonnegative(*it, prefix + "h", loc);
    }
    return tok;
}

} // namespace

TrajectoryRecord parse_record_line(std::string_view line, const std::string& location) {
    json obj;
    try {
        obj = json::parse(line.begin(), line.end());
    } catch (const json::parse_error& e) {
        fail(location, std::string("malformed record: ") + e.what());
    }
    if (!obj.is_object()) {
        fail(location, "record must be a JSON object");
    }

    const std::string version = as_string(require(obj, "schema_version", location), "schema_version", location);
    if (version != kSchemaVersion) {
        fail(location, "unsupported schema_version '" + version + "'");
    }

    TrajectoryRecord rec;
    rec.problem_id = as_string(require(obj, "problem_id", location), "problem_id", location);
    rec.teacher_id = as_string(require(obj, "teacher_id", location), "teacher_id", location);
    std::int64_t rollout = as_integer(require(obj, "rollout_id", location), "rollout_id", location);
    if (rollout < 0 || rollout > std::numeric_limits<int>::max()) {
        fail(location, "field 'rollout_id' out of range");
    }
    rec.rollout_id = static_cast<int>(rollout);
    rec.k_ext = as_integer(require(obj, "k_ext", location), "k_ext", location);
    if (rec.k_ext < 1) {
        fail(location, "field 'k_ext' must be >= 1");
    }

    const json& tokens = require(obj, "tokens", location);
    if (!tokens.is_array()) {
        fail(location, "field 'tokens' must be an array");
    }
    rec.tokens.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        rec.tokens.push_back(parse_token(tokens[i], i, rec.k_ext, location));
    }

    if (auto it = obj.find("text"); it != obj.end() && !it->is_null()) {
        rec.text = as_string(*it, "text", location);
    }
    if (auto it = obj.find("correct"); it != obj.end() && !it->is_null()) {
        if (!it->is_boolean()) {
            fail(location, "field 'correct' must be a boolean");
        }
        rec.correct = it->get<bool>();
    }
    if (auto it = obj.find("scores"); it != obj.end() && !it->is_null()) {
        if (!it->is_object()) {
            fail(location, "field 'scores' must be an object");
        }
        for (const auto& [name, value] : it->items()) {
            rec.external_scores[name] = as_real(value, "scores." + name, location);
        }
    }
    return rec;
}

std::string serialize_record(const TrajectoryRecord& record) {
    ordered_json obj;
    obj["schema_version"] = kSchemaVersion;
    obj["problem_id"] = record.problem_id;
    obj["teacher_id"] = record.teacher_id;
    obj["rollout_id"] = record.rollout_id;
    obj["k_ext"] = record.k_ext;
    ordered_json tokens = ordered_json::array();
    for (const TokenStat& t : record.tokens) {
        ordered_json tok;
        tok["s"] = t.surprisal;
        tok["r"] = t.rank;
        tok["rs"] = t.rank_saturated;
        if (t.local_surprisal) {
            tok["ls"] = *t.local_surprisal;
        }
        if (t.entropy) {
            tok["h"] = *t.entropy;
        }
        tokens.push_back(std::move(tok));
    }
    obj["tokens"] = std::move(tokens);
    if (record.text) {
        obj["text"] = *record.text;
    }
    if (record.correct) {
        obj["correct"] = *record.correct;
    }
    if (!record.external_scores.empty()) {
        ordered_json scores = ordered_json::object();
        for (const auto& [name, value] : record.external_scores) {
            scores[name] = value;
        }
        obj["scores"] = std::move(scores);
    }
    return obj.dump();
}

TokenStatReader::TokenStatReader(std::istream& in, std::string source_name)
    : in_(in), source_(std::move(source_name)) {}

std::optional<TrajectoryRecord> TokenStatReader::next() {
    while (std::getline(in_, buffer_)) {
        ++line_no_;
        if (!buffer_.empty() && buffer_.back() == '\r') {
            buffer_.pop_back();
        }
        if (buffer_.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        return parse_record_line(buffer_, source_ + ":" + std::to_string(line_no_));
    }
    return std::nullopt;
}

TrajectoryDataset parse_token_stats(std::istream& in, const std::string& source_name,
                                    const std::optional<DatasetManifest>& manifest) {
    TrajectoryDataset ds;
    if (manifest) {
        ds.dataset_id = manifest->dataset_id;
        ds.student_id = manifest->student_id;
        ds.k_ext = manifest->k_ext;
    }
    bool have_cap = manifest.has_value();
    std::int64_t cap = manifest ? manifest->k_ext : 0;

    std::set<std::string> seen;
    TokenStatReader reader(in, source_name);
    while (auto rec = reader.next()) {
        const std::string loc = source_name + ":" + std::to_string(reader.line_number());
        if (have_cap && rec->k_ext != cap) {
            fail(loc, "k_ext " + std::to_string(rec->k_ext) + " differs from dataset k_ext " +
                          std::to_string(cap));
        }
        cap = rec->k_ext;
        have_cap = true;
        if (!seen.insert(rec->key()).second) {
            fail(loc, "duplicate record key " + rec->key());
        }
        ds.records.push_back(std::move(*rec));
    }
    if (have_cap) {
        ds.k_ext = cap;
    }
    return ds;
}

void write_token_stats(std::ostream& out, const TrajectoryDataset& dataset) {
    for (const TrajectoryRecord& rec : dataset.records) {
        out << serialize_record(rec) << '\n';
    }
}

std::filesystem::path manifest_path_for(const std::filesystem::path& stats_path) {
    std::filesystem::path p = stats_path;
    p += ".manifest.json";
    return p;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open manifest", path.string());
    }
    json obj;
    try {
        obj = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed manifest: ") + e.what(), path.string());
    }
    const std::string loc = path.string();
    DatasetManifest m;
    m.dataset_id = as_string(require(obj, "dataset_id", loc), "dataset_id", loc);
    m.student_id = as_string(require(obj, "student_id", loc), "student_id", loc);
    m.surprisal_unit = as_string(require(obj, "surprisal_unit", loc), "surprisal_unit", loc);
    if (m.surprisal_unit != kSurprisalUnit) {
        throw InputError("surprisal_unit must be 'nats' (got '" + m.surprisal_unit + "')", loc);
    }
    m.k_ext = as_integer(require(obj, "k_ext", loc), "k_ext", loc);
    if (m.k_ext < 1) {
        throw InputError("field 'k_ext' must be >= 1", loc);
    }
    if (auto it = obj.find("extraction"); it != obj.end() && it->is_object()) {
        for (const auto& [k, v] : it->items()) {
            m.extraction[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
    }
    return m;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
    ordered_json obj;
    obj["schema_version"] = kSchemaVersion;
    obj["dataset_id"] = manifest.dataset_id;
    obj["student_id"] = manifest.student_id;
    obj["surprisal_unit"] = manifest.surprisal_unit;
    obj["k_ext"] = manifest.k_ext;
    ordered_json extraction = ordered_json::object();
    for (const auto& [k, v] : manifest.extraction) {
        extraction[k] = v;
    }
    obj["extraction"] = std::move(extraction);
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write manifest", path.string());
    }
    out << obj.dump(2) << '\n';
}

TrajectoryDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open token-stats file", path.string());
    }
    std::optional<DatasetManifest> manifest;
    if (auto mp = manifest_path_for(path); std::filesystem::exists(mp)) {
        manifest = read_manifest(mp);
    }
    TrajectoryDataset ds = parse_token_stats(in, path.string(), manifest);
    if (!manifest) {
        ds.dataset_id = path.stem().string();
        ds.student_id = "unknown";
    }
    return ds;
}

void save_dataset(const std::filesystem::path& path, const TrajectoryDataset& dataset,
                  std::map<std::string, std::string> extraction) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write token-stats file", path.string());
    }
    write_token_stats(out, dataset);
    DatasetManifest m;
    m.dataset_id = dataset.dataset_id;
    m.student_id = dataset.student_id;
    m.k_ext = dataset.k_ext;
    m.extraction = std::move(extraction);
    write_manifest(manifest_path_for(path), m);
}

} // namespace rsr
