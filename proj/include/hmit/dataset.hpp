#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hmit {

enum class AttributeKind { categorical, numeric };

std::string_view to_string(AttributeKind kind);
AttributeKind attribute_kind_from_string(std::string_view text);

struct AttributeSchema {
    std::string name;
    AttributeKind kind = AttributeKind::categorical;
    std::vector<std::string> levels;  // categorical only, first-appearance order

    bool is_numeric() const { return kind == AttributeKind::numeric; }
    std::optional<std::uint32_t> find_level(std::string_view label) const;
};

// A present cell. `text` is the exact CSV token; `level` is meaningful for
// categorical attributes and `number` for numeric ones.
struct Value {
    std::string text;
    double number = 0.0;
    std::uint32_t level = 0;

    friend bool operator==(const Value&, const Value&) = default;
};

using Cell = std::optional<Value>;

struct Record {
    std::size_t id = 0;  // row index
    std::vector<Cell> cells;

    std::size_t present_count() const;

    friend bool operator==(const Record&, const Record&) = default;
};

// Shortest decimal text that round-trips to `v`.
std::string format_number(double v);

Value numeric_value(double v);
Value categorical_value(const AttributeSchema& attribute, std::uint32_t level);

class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<AttributeSchema> schema, std::vector<Record> records,
            std::optional<std::string> class_column = std::nullopt);

    const std::vector<AttributeSchema>& schema() const { return schema_; }
    const AttributeSchema& attribute(std::size_t index) const { return schema_.at(index); }
    std::size_t attribute_count() const { return schema_.size(); }

    const std::vector<Record>& records() const { return records_; }
    const Record& record(std::size_t row) const { return records_.at(row); }
    std::size_t record_count() const { return records_.size(); }

    const Cell& cell(std::size_t row, std::size_t attribute) const {
        return records_.at(row).cells.at(attribute);
    }
    void set_cell(std::size_t row, std::size_t attribute, Cell cell);

    const std::optional<std::string>& class_column() const { return class_column_; }
    std::optional<std::size_t> class_index() const;
    void set_class_column(std::optional<std::string> name);

    std::optional<std::size_t> find_attribute(std::string_view name) const;
    std::size_t index_of(std::string_view name) const;  // throws DataError

    // Returns the level index of `label`, appending it to the attribute's
    // levels when unseen.
    std::uint32_t intern_level(std::size_t attribute, const std::string& label);

    std::size_t missing_count() const;
    std::size_t missing_count(std::size_t attribute) const;

private:
    void validate() const;

    std::vector<AttributeSchema> schema_;
    std::vector<Record> records_;
    std::optional<std::string> class_column_;
};

// ---------------------------------------------------------------------------
// CSV input/output

struct CsvOptions {
    std::string missing_marker = "?";
    // Forces the kind of a column instead of inferring it.
    std::map<std::string, AttributeKind, std::less<>> kind_hints;
    std::optional<std::string> class_column;
};

// Splits RFC-4180 text into rows of fields. Quoted fields may contain
// separators, doubled quotes and line breaks. Blank lines are skipped.
std::vector<std::vector<std::string>> parse_csv_rows(std::istream& in);

Dataset read_csv(std::istream& in, const CsvOptions& options = {});
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

void write_csv(const Dataset& dataset, std::ostream& out, std::string_view missing_marker = "?");
void write_csv(const Dataset& dataset, const std::filesystem::path& path,
               std::string_view missing_marker = "?");

}  // namespace hmit
