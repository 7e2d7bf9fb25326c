#include "simstudy/value.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "simstudy/errors.hpp"

namespace simstudy {

const char* to_string(ValueKind kind) {
    switch (kind) {
        case ValueKind::text: return "text";
        case ValueKind::floating: return "float";
        case ValueKind::integer: return "integer";
        case ValueKind::boolean: return "boolean";
    }
    return "?";
}

const std::string& Value::as_text() const {
    if (auto p = std::get_if<std::string>(&data_)) return *p;
    throw Error("value is " + std::string(to_string(kind())) + ", not text");
}

double Value::as_float() const {
    if (auto p = std::get_if<double>(&data_)) return *p;
    throw Error("value is " + std::string(to_string(kind())) + ", not float");
}

std::int64_t Value::as_integer() const {
    if (auto p = std::get_if<std::int64_t>(&data_)) return *p;
    throw Error("value is " + std::string(to_string(kind())) + ", not integer");
}

bool Value::as_bool() const {
    if (auto p = std::get_if<bool>(&data_)) return *p;
    throw Error("value is " + std::string(to_string(kind())) + ", not boolean");
}

double Value::to_double() const {
    switch (kind()) {
        case ValueKind::floating: return std::get<double>(data_);
        case ValueKind::integer: return static_cast<double>(std::get<std::int64_t>(data_));
        case ValueKind::boolean: return std::get<bool>(data_) ? 1.0 : 0.0;
        case ValueKind::text: break;
    }
    throw Error("text value has no numeric view");
}

std::string Value::str() const {
    switch (kind()) {
        case ValueKind::text: return std::get<std::string>(data_);
        case ValueKind::floating: return format_double(std::get<double>(data_));
        case ValueKind::integer: return std::to_string(std::get<std::int64_t>(data_));
        case ValueKind::boolean: return std::get<bool>(data_) ? "true" : "false";
    }
    return {};
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (a.data_.index() != b.data_.index()) return a.data_.index() <=> b.data_.index();
    switch (a.kind()) {
        case ValueKind::text: return std::get<std::string>(a.data_) <=> std::get<std::string>(b.data_);
        case ValueKind::integer:
            return std::get<std::int64_t>(a.data_) <=> std::get<std::int64_t>(b.data_);
        case ValueKind::boolean: return std::get<bool>(a.data_) <=> std::get<bool>(b.data_);
        case ValueKind::floating: {
            double x = std::get<double>(a.data_);
            double y = std::get<double>(b.data_);
            bool nx = std::isnan(x), ny = std::isnan(y);
            if (nx || ny) return nx == ny ? std::strong_ordering::equal
                                          : (nx ? std::strong_ordering::greater : std::strong_ordering::less);
            if (x < y) return std::strong_ordering::less;
            if (x > y) return std::strong_ordering::greater;
            return std::strong_ordering::equal;
        }
    }
    return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Value& v) { return os << v.str(); }

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

}  // namespace simstudy
