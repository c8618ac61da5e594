/**
 * @file snapshot.hpp
 * @brief Snapshot CSV: '#'-prefixed "key: value" metadata lines, then
 *        columns x, patch, field, value at 17 significant digits.
 */
#pragma once

#include "gaptooth/grid.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace gaptooth {

struct SnapshotRow {
    double x = 0.0;
    int patch = 0; // 0 for the full-domain reference
    Field field = Field::Depth;
    double value = 0.0;

    bool operator==(const SnapshotRow&) const = default;
};

struct Snapshot {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<SnapshotRow> rows;

    void add_meta(std::string key, std::string value) { metadata.emplace_back(std::move(key), std::move(value)); }
    /// Value of a metadata key, empty if absent.
    std::string meta(const std::string& key) const;

    bool operator==(const Snapshot&) const = default;
};

/// Shortest-exact-enough rendering used throughout the CSV outputs.
std::string format_number(double v);

void write_snapshot(std::ostream& os, const Snapshot& snap);
Snapshot read_snapshot(std::istream& is);

} // namespace gaptooth
