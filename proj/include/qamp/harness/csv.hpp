#pragma once

// Minimal CSV emission. Numbers go through std::to_chars (shortest round-trip
// form), so identical inputs give byte-identical files on any platform.

#include <charconv>
#include <cmath>
#include <concepts>
#include <stdexcept>
#include <type_traits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace qamp::harness {

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

template <std::integral T>
std::string format_number(T v) {
    char buf[24];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

inline std::string format_number(bool v) { return v ? "1" : "0"; }

/// Quotes a field only when it contains a separator, quote or newline.
inline std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

class CsvRow {
public:
    CsvRow& add(std::string_view text) {
        fields_.push_back(csv_escape(text));
        return *this;
    }
    CsvRow& add(const char* text) { return add(std::string_view(text)); }
    CsvRow& add(const std::string& text) { return add(std::string_view(text)); }

    template <class T>
        requires std::is_arithmetic_v<T>
    CsvRow& add(T value) {
        fields_.push_back(format_number(value));
        return *this;
    }

    [[nodiscard]] const std::vector<std::string>& fields() const noexcept { return fields_; }

private:
    std::vector<std::string> fields_;
};

/// Header plus rows; LF line endings regardless of platform.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void push(CsvRow row) {
        if (row.fields().size() != header_.size())
            throw std::logic_error("csv row has " + std::to_string(row.fields().size()) + " fields, header has " +
                                   std::to_string(header_.size()));
        rows_.push_back(std::move(row));
    }

    [[nodiscard]] const std::vector<std::string>& header() const noexcept { return header_; }
    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }

    void write(std::ostream& out) const {
        write_line(out, header_);
        for (const auto& r : rows_) write_line(out, r.fields());
    }

private:
    static void write_line(std::ostream& out, const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out << ',';
            out << fields[i];
        }
        out << '\n';
    }

    std::vector<std::string> header_;
    std::vector<CsvRow> rows_;
};

} // namespace qamp::harness
