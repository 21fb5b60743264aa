#include "hmit/dataset.hpp"

#include "hmit/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

namespace hmit {

std::string_view to_string(AttributeKind kind) {
    return kind == AttributeKind::numeric ? "numeric" : "categorical";
}

AttributeKind attribute_kind_from_string(std::string_view text) {
    if (text == "numeric") return AttributeKind::numeric;
    if (text == "categorical") return AttributeKind::categorical;
    throw DataError("unknown attribute kind '" + std::string(text) + "'");
}

std::optional<std::uint32_t> AttributeSchema::find_level(std::string_view label) const {
    auto it = std::find(levels.begin(), levels.end(), label);
    if (it == levels.end()) return std::nullopt;
    return static_cast<std::uint32_t>(it - levels.begin());
}

std::size_t Record::present_count() const {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [](const Cell& c) { return c.has_value(); }));
}

std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
    return std::string(buf, end);
}

Value numeric_value(double v) {
    Value out;
    out.text = format_number(v);
    out.number = v;
    return out;
}

Value categorical_value(const AttributeSchema& attribute, std::uint32_t level) {
    Value out;
    out.text = attribute.levels.at(level);
    out.level = level;
    return out;
}

// ---------------------------------------------------------------------------

Dataset::Dataset(std::vector<AttributeSchema> schema, std::vector<Record> records,
                 std::optional<std::string> class_column)
    : schema_(std::move(schema)), records_(std::move(records)) {
    validate();
    set_class_column(std::move(class_column));
}

void Dataset::validate() const {
    std::unordered_set<std::string> names;
    for (const auto& a : schema_) {
        if (!names.insert(a.name).second) throw DataError("duplicate attribute name '" + a.name + "'");
        std::unordered_set<std::string> levels(a.levels.begin(), a.levels.end());
        if (levels.size() != a.levels.size())
            throw DataError("duplicate level in attribute '" + a.name + "'");
    }
    for (std::size_t r = 0; r < records_.size(); ++r) {
        const Record& rec = records_[r];
        if (rec.id != r) throw DataError("record ids must equal row indices");
        if (rec.cells.size() != schema_.size())
            throw DataError("record " + std::to_string(r) + " has " + std::to_string(rec.cells.size()) +
                            " cells, schema has " + std::to_string(schema_.size()));
        for (std::size_t a = 0; a < schema_.size(); ++a) {
            const Cell& c = rec.cells[a];
            if (c && !schema_[a].is_numeric() && c->level >= schema_[a].levels.size())
                throw DataError("record " + std::to_string(r) + ": level out of range for '" +
                                schema_[a].name + "'");
        }
    }
}

void Dataset::set_cell(std::size_t row, std::size_t attribute, Cell cell) {
    if (cell && !schema_.at(attribute).is_numeric() && cell->level >= schema_[attribute].levels.size())
        throw DataError("level out of range for '" + schema_[attribute].name + "'");
    records_.at(row).cells.at(attribute) = std::move(cell);
}

std::optional<std::size_t> Dataset::class_index() const {
    if (!class_column_) return std::nullopt;
    return find_attribute(*class_column_);
}

void Dataset::set_class_column(std::optional<std::string> name) {
    if (name && !find_attribute(*name)) throw DataError("class column '" + *name + "' not in header");
    class_column_ = std::move(name);
}

std::optional<std::size_t> Dataset::find_attribute(std::string_view name) const {
    for (std::size_t i = 0; i < schema_.size(); ++i)
        if (schema_[i].name == name) return i;
    return std::nullopt;
}

std::size_t Dataset::index_of(std::string_view name) const {
    if (auto i = find_attribute(name)) return *i;
    throw DataError("unknown attribute '" + std::string(name) + "'");
}

std::uint32_t Dataset::intern_level(std::size_t attribute, const std::string& label) {
    auto& a = schema_.at(attribute);
    if (a.is_numeric()) throw DataError("attribute '" + a.name + "' is numeric");
    if (auto l = a.find_level(label)) return *l;
    a.levels.push_back(label);
    return static_cast<std::uint32_t>(a.levels.size() - 1);
}

std::size_t Dataset::missing_count() const {
    std::size_t n = 0;
    for (const auto& r : records_) n += r.cells.size() - r.present_count();
    return n;
}

std::size_t Dataset::missing_count(std::size_t attribute) const {
    std::size_t n = 0;
    for (const auto& r : records_)
        if (!r.cells.at(attribute)) ++n;
    return n;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

struct CsvRow {
    std::vector<std::string> fields;
    std::size_t line = 0;
};

std::vector<CsvRow> parse_rows(std::istream& in) {
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (text.rfind("\xEF\xBB\xBF", 0) == 0) text.erase(0, 3);

    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;  // distinguishes "" from an empty line
    std::size_t line = 1;
    row.line = line;

    auto end_row = [&] {
        if (field_started || !row.fields.empty()) {
            row.fields.push_back(std::move(field));
            rows.push_back(std::move(row));
        }
        row = CsvRow{};
        field.clear();
        field_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                row.fields.push_back(std::move(field));
                field.clear();
                field_started = true;
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') break;
                [[fallthrough]];
            case '\n':
                end_row();
                row.line = ++line;
                break;
            default:
                field.push_back(c);
                field_started = true;
        }
    }
    if (in_quotes) throw DataError("line " + std::to_string(row.line) + ": unterminated quoted field");
    end_row();
    return rows;
}

std::optional<double> parse_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

bool needs_quotes(std::string_view s) {
    return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

void write_field(std::ostream& out, std::string_view s) {
    if (!needs_quotes(s)) {
        out << s;
        return;
    }
    out << '"';
    for (char c : s) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv_rows(std::istream& in) {
    std::vector<std::vector<std::string>> out;
    for (auto& row : parse_rows(in)) out.push_back(std::move(row.fields));
    return out;
}

Dataset read_csv(std::istream& in, const CsvOptions& options) {
    auto rows = parse_rows(in);
    if (rows.empty()) throw DataError("empty dataset");
    const auto& header = rows.front().fields;
    const std::size_t width = header.size();
    if (rows.size() == 1) throw DataError("empty dataset");

    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].fields.size() != width)
            throw DataError("line " + std::to_string(rows[r].line) + ": expected " + std::to_string(width) +
                            " fields, found " + std::to_string(rows[r].fields.size()));
    }
    for (const auto& [name, kind] : options.kind_hints) {
        if (std::find(header.begin(), header.end(), name) == header.end())
            throw DataError("kind hint for unknown column '" + name + "'");
    }

    const std::string& marker = options.missing_marker;
    std::vector<AttributeSchema> schema(width);
    for (std::size_t a = 0; a < width; ++a) {
        schema[a].name = header[a];
        auto hint = options.kind_hints.find(header[a]);
        if (hint != options.kind_hints.end()) {
            schema[a].kind = hint->second;
            continue;
        }
        bool any = false;
        bool all_numeric = true;
        for (std::size_t r = 1; r < rows.size() && all_numeric; ++r) {
            const auto& f = rows[r].fields[a];
            if (f == marker) continue;
            any = true;
            all_numeric = parse_number(f).has_value();
        }
        schema[a].kind = any && all_numeric ? AttributeKind::numeric : AttributeKind::categorical;
    }

    std::vector<Record> records;
    records.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        Record rec;
        rec.id = r - 1;
        rec.cells.resize(width);
        for (std::size_t a = 0; a < width; ++a) {
            std::string& f = rows[r].fields[a];
            if (f == marker) continue;
            Value v;
            if (schema[a].is_numeric()) {
                auto num = parse_number(f);
                if (!num)
                    throw DataError("line " + std::to_string(rows[r].line) + ": '" + f +
                                    "' is not numeric (column '" + schema[a].name + "')");
                v.number = *num;
            } else {
                auto level = schema[a].find_level(f);
                if (!level) {
                    schema[a].levels.push_back(f);
                    level = static_cast<std::uint32_t>(schema[a].levels.size() - 1);
                }
                v.level = *level;
            }
            v.text = std::move(f);
            rec.cells[a] = std::move(v);
        }
        records.push_back(std::move(rec));
    }
    return Dataset(std::move(schema), std::move(records), options.class_column);
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return read_csv(in, options);
}

void write_csv(const Dataset& dataset, std::ostream& out, std::string_view missing_marker) {
    for (std::size_t a = 0; a < dataset.attribute_count(); ++a) {
        if (a) out << ',';
        write_field(out, dataset.attribute(a).name);
    }
    out << '\n';
    for (const auto& rec : dataset.records()) {
        for (std::size_t a = 0; a < rec.cells.size(); ++a) {
            if (a) out << ',';
            write_field(out, rec.cells[a] ? std::string_view(rec.cells[a]->text) : missing_marker);
        }
        out << '\n';
    }
}

void write_csv(const Dataset& dataset, const std::filesystem::path& path, std::string_view missing_marker) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    write_csv(dataset, out, missing_marker);
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace hmit
