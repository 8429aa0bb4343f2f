#include "hdtele/csv.hpp"

#include "hdtele/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <ostream>

namespace hdtele {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // drop the sign of negative zero
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw Error("number formatting failed");
    return std::string(buf, ptr);
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw InvalidArgument("table row width does not match header");
    rows.push_back(std::move(row));
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return csv_field(std::get<std::string>(c));
}

}  // namespace

void write_csv(std::ostream& out, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << csv_field(t.columns[i]);
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
        out << '\n';
    }
}

void write_json(std::ostream& out, const Table& t) {
    // numbers go through the CSV formatter so both outputs carry the same digits
    std::string s = "{";
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        s += (c ? "," : "");
        s += nlohmann::json(t.columns[c]).dump() + ":[";
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            s += (r ? "," : "");
            const Cell& cell = t.rows[r][c];
            if (const auto* d = std::get_if<double>(&cell)) {
                s += std::isfinite(*d) ? format_number(*d) : nlohmann::json(format_number(*d)).dump();
            } else if (const auto* i = std::get_if<long long>(&cell)) {
                s += std::to_string(*i);
            } else {
                s += nlohmann::json(std::get<std::string>(cell)).dump();
            }
        }
        s += "]";
    }
    s += "}\n";
    out << s;
}

}  // namespace hdtele
