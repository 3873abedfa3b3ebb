// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsr/core/types.hpp"

namespace rsr {

struct Violation {
    std::string location;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

inline constexpr std::string_view kCapBelowClip = "extraction cap below clip threshold";

struct ValidationReport {
    std::vector<Violation> violations;
    std::size_t records = 0;
    std::size_t total_tokens = 0;
    std::size_t saturated_tokens = 0;

    bool ok() const noexcept { return violations.empty(); }
    double saturation_fraction() const noexcept {
        return total_tokens == 0 ? 0.0
                                 : static_cast<double>(saturated_tokens) / static_cast<double>(total_tokens);
    }
};

/// Report-only check of an in-memory dataset against a clip threshold.
/// Never throws on bad data.
ValidationReport validate_dataset(const TrajectoryDataset& dataset, std::int64_t r_max);

/// Total validation of a raw token-stats stream: keeps going past bad lines and
/// reports each with its line number, then applies the dataset checks to the
/// lines that did parse.
ValidationReport validate_stream(std::istream& in, const std::string& source_name, std::int64_t r_max);

} // namespace rsr
