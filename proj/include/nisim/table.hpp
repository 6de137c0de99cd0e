#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace nisim {

/// Provenance of a shot-noise sampled table.
struct TableMeta {
    std::uint64_t seed = 0;
    double n0 = 0.0;
    double v = 1.0;
};

struct CountRow {
    std::vector<double> angles;
    double rate = 0.0;
    std::optional<std::uint64_t> counts;
};

/// Phase settings -> relative rate (and, once sampled, integer counts).
/// Columns name the angle axes; rows keep grid order.
struct CountTable {
    std::vector<std::string> columns;
    std::vector<CountRow> rows;
    std::optional<TableMeta> meta;
};

/// 12-significant-digit representation used for every serialized numeric
/// field, so CSV and JSON renditions of the same run agree byte for byte.
std::string format_number(double value);

void write_csv(const CountTable& table, std::ostream& out, double angle_scale = 1.0);
void write_json(const CountTable& table, std::ostream& out, double angle_scale = 1.0);

}  // namespace nisim
