#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace hdtele {

// Shortest round-trip decimal form, '.' separator, independent of locale.
std::string format_number(double v);

using Cell = std::variant<double, long long, std::string>;

// Column-oriented table written as CSV (header row) or as a flat JSON object
// mapping each column name to its array of values.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

void write_csv(std::ostream& out, const Table& t);
void write_json(std::ostream& out, const Table& t);

}  // namespace hdtele
