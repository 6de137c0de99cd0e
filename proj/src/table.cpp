#include "nisim/table.hpp"

#include <cstdio>
#include <stdexcept>

namespace nisim {

std::string format_number(double value) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

namespace {

bool has_counts(const CountTable& table) {
    if (table.rows.empty() || !table.rows.front().counts) {
        return false;
    }
    for (const auto& row : table.rows) {
        if (!row.counts) {
            throw std::invalid_argument("count table mixes sampled and unsampled rows");
        }
    }
    return true;
}

void check_row_width(const CountTable& table) {
    for (const auto& row : table.rows) {
        if (row.angles.size() != table.columns.size()) {
            throw std::invalid_argument("count table row width does not match columns");
        }
    }
}

}  // namespace

void write_csv(const CountTable& table, std::ostream& out, double angle_scale) {
    check_row_width(table);
    const bool counts = has_counts(table);
    if (table.meta) {
        out << "# seed=" << table.meta->seed << " n0=" << format_number(table.meta->n0)
            << " v=" << format_number(table.meta->v) << "\n";
    }
    for (const auto& col : table.columns) {
        out << col << ",";
    }
    out << "rate";
    if (counts) {
        out << ",counts";
    }
    out << "\n";
    for (const auto& row : table.rows) {
        for (double angle : row.angles) {
            out << format_number(angle * angle_scale) << ",";
        }
        out << format_number(row.rate);
        if (counts) {
            out << "," << *row.counts;
        }
        out << "\n";
    }
}

void write_json(const CountTable& table, std::ostream& out, double angle_scale) {
    check_row_width(table);
    const bool counts = has_counts(table);
    out << "{\n  \"columns\": [";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? ", " : "") << '"' << table.columns[i] << '"';
    }
    out << ", \"rate\"";
    if (counts) {
        out << ", \"counts\"";
    }
    out << "],\n";
    if (table.meta) {
        out << "  \"meta\": {\"seed\": " << table.meta->seed
            << ", \"n0\": " << format_number(table.meta->n0)
            << ", \"v\": " << format_number(table.meta->v) << "},\n";
    }
    out << "  \"rows\": [\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        out << "    [";
        for (double angle : row.angles) {
            out << format_number(angle * angle_scale) << ", ";
        }
        out << format_number(row.rate);
        if (counts) {
            out << ", " << *row.counts;
        }
        out << (r + 1 < table.rows.size() ? "],\n" : "]\n");
    }
    out << "  ]\n}\n";
}

}  // namespace nisim
