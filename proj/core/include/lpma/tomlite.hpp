#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace lpma::toml {

class Value;

/// Key-ordered table of values.
using Table = std::map<std::string, Value>;

/// TOML-subset value: scalars, homogeneous scalar arrays, tables, arrays of tables.
class Value {
  public:
    using Array = std::vector<Value>;
    using TableArray = std::vector<Table>;
    using Data = std::variant<std::int64_t, double, bool, std::string, Array, Table, TableArray>;

    Value() : data_(std::int64_t{0}) {}
    explicit Value(Data data) : data_(std::move(data)) {}

    [[nodiscard]] bool is_integer() const { return std::holds_alternative<std::int64_t>(data_); }
    [[nodiscard]] bool is_float() const { return std::holds_alternative<double>(data_); }
    [[nodiscard]] bool is_bool() const { return std::holds_alternative<bool>(data_); }
    [[nodiscard]] bool is_string() const { return std::holds_alternative<std::string>(data_); }
    [[nodiscard]] bool is_array() const { return std::holds_alternative<Array>(data_); }
    [[nodiscard]] bool is_table() const { return std::holds_alternative<Table>(data_); }
    [[nodiscard]] bool is_table_array() const {
        return std::holds_alternative<TableArray>(data_);
    }

    /// @brief Integer content. @throws Error{InvalidSpec} on type mismatch.
    [[nodiscard]] std::int64_t as_integer() const;
    /// @brief Numeric content; integers promote to double.
    [[nodiscard]] double as_float() const;
    [[nodiscard]] bool as_bool() const;
    [[nodiscard]] const std::string& as_string() const;
    [[nodiscard]] const Array& as_array() const;
    [[nodiscard]] const Table& as_table() const;
    [[nodiscard]] const TableArray& as_table_array() const;

    [[nodiscard]] Data& data() { return data_; }
    [[nodiscard]] const Data& data() const { return data_; }

  private:
    Data data_;
};

/// @brief Parse a TOML subset: comments, scalar and array assignments, [table]
/// and [[array-of-table]] headers with dotted paths.
/// @throws Error{InvalidSpec} with the offending line number in the message.
[[nodiscard]] Table parse(const std::string& text);

}  // namespace lpma::toml
