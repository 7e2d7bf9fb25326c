#pragma once

#include <compare>
#include <concepts>
#include <cstdint>
#include <ostream>
#include <string>
#include <variant>

namespace simstudy {

enum class ValueKind { text, floating, integer, boolean };

const char* to_string(ValueKind kind);

/// A scalar parameter value. Integral literals become integers, floating
/// literals become floats, so `Value{100}` and `Value{100.0}` differ.
class Value {
public:
    using Storage = std::variant<std::string, double, std::int64_t, bool>;

    Value() : data_(std::int64_t{0}) {}
    Value(bool b) : data_(b) {}
    Value(const char* s) : data_(std::string(s)) {}
    Value(std::string s) : data_(std::move(s)) {}
    Value(std::string_view s) : data_(std::string(s)) {}
    template <std::integral I>
        requires(!std::same_as<I, bool>)
    Value(I i) : data_(static_cast<std::int64_t>(i)) {}
    template <std::floating_point F>
    Value(F f) : data_(static_cast<double>(f)) {}

    ValueKind kind() const noexcept { return static_cast<ValueKind>(data_.index()); }

    bool is_text() const noexcept { return kind() == ValueKind::text; }
    bool is_float() const noexcept { return kind() == ValueKind::floating; }
    bool is_integer() const noexcept { return kind() == ValueKind::integer; }
    bool is_bool() const noexcept { return kind() == ValueKind::boolean; }

    const std::string& as_text() const;
    double as_float() const;
    std::int64_t as_integer() const;
    bool as_bool() const;

    /// Numeric view: floats, integers and booleans convert; text throws.
    double to_double() const;

    const Storage& storage() const noexcept { return data_; }

    /// Human-readable rendering; floats use the shortest round-trip form.
    std::string str() const;

    friend bool operator==(const Value&, const Value&) = default;
    /// Orders by kind first, then by value. Total order, NaN sorts last.
    friend std::strong_ordering operator<=>(const Value& a, const Value& b);

private:
    Storage data_;
};

std::ostream& operator<<(std::ostream& os, const Value& v);

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

}  // namespace simstudy
