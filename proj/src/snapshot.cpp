#include "gaptooth/snapshot.hpp"

#include "gaptooth/errors.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace gaptooth {

std::string Snapshot::meta(const std::string& key) const {
    for (const auto& [k, v] : metadata)
        if (k == key) return v;
    return {};
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_snapshot(std::ostream& os, const Snapshot& snap) {
    for (const auto& [k, v] : snap.metadata) os << "# " << k << ": " << v << '\n';
    os << "x,patch,field,value\n";
    for (const auto& r : snap.rows)
        os << format_number(r.x) << ',' << r.patch << ',' << to_string(r.field) << ',' << format_number(r.value)
           << '\n';
}

Snapshot read_snapshot(std::istream& is) {
    Snapshot snap;
    std::string line;
    bool header = false;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& why) {
        throw ConfigError("snapshot line " + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(": ");
            if (colon == std::string::npos || line.size() < 2) fail("malformed metadata");
            snap.add_meta(line.substr(2, colon - 2), line.substr(colon + 2));
            continue;
        }
        if (!header) {
            if (line != "x,patch,field,value") fail("unexpected column header");
            header = true;
            continue;
        }
        std::istringstream ss(line);
        std::string x, patch, field, value;
        if (!std::getline(ss, x, ',') || !std::getline(ss, patch, ',') || !std::getline(ss, field, ',') ||
            !std::getline(ss, value))
            fail("expected four columns");
        SnapshotRow row;
        try {
            row.x = std::stod(x);
            row.patch = std::stoi(patch);
            row.value = std::stod(value);
        } catch (const std::exception&) {
            fail("bad number");
        }
        if (field == "h") row.field = Field::Depth;
        else if (field == "u") row.field = Field::Velocity;
        else fail("field must be h or u");
        snap.rows.push_back(row);
    }
    if (!header) throw ConfigError("snapshot has no column header");
    return snap;
}

} // namespace gaptooth
