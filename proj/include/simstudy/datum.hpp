#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace simstudy {

using Bytes = std::vector<std::uint8_t>;

/// Structured value stored in blob columns: null, bool, integer, float,
/// text, bytes, list, or string-keyed map. Maps keep their keys sorted and
/// unique, so two maps with the same entries compare equal.
class Datum {
public:
    using List = std::vector<Datum>;
    using Map = std::vector<std::pair<std::string, Datum>>;
    using Storage = std::variant<std::nullptr_t, bool, std::int64_t, double, std::string, Bytes, List, Map>;

    Datum() : data_(nullptr) {}
    Datum(std::nullptr_t) : data_(nullptr) {}
    Datum(bool b) : data_(b) {}
    Datum(int i) : data_(std::int64_t{i}) {}
    Datum(std::int64_t i) : data_(i) {}
    Datum(double d) : data_(d) {}
    Datum(const char* s) : data_(std::string(s)) {}
    Datum(std::string s) : data_(std::move(s)) {}
    Datum(Bytes b) : data_(std::move(b)) {}
    Datum(List l) : data_(std::move(l)) {}
    Datum(Map m);

    static Datum list(std::initializer_list<Datum> items) { return Datum(List(items)); }
    static Datum map(std::initializer_list<std::pair<std::string, Datum>> items) { return Datum(Map(items)); }
    static Datum floats(std::span<const double> xs);

    const Storage& storage() const noexcept { return data_; }

    template <class T>
    bool is() const noexcept { return std::holds_alternative<T>(data_); }
    template <class T>
    const T& get() const { return std::get<T>(data_); }

    /// Map lookup; nullptr when absent or not a map.
    const Datum* find(std::string_view key) const;

    /// Bitwise comparison for floats (so NaN payloads and -0.0 round-trip checks are exact).
    friend bool operator==(const Datum& a, const Datum& b);

private:
    Storage data_;
};

/// Deterministic CBOR (RFC 8949) encoding. Integers use the shortest head,
/// floats are always 64-bit, map keys are sorted by their encoded bytes.
Bytes serialize_blob(const Datum& value);

/// Decodes the CBOR subset produced by serialize_blob, plus half/single
/// precision floats. Throws BlobError on malformed or unsupported input
/// (tags, indefinite lengths, non-text map keys, trailing bytes).
Datum deserialize_blob(std::span<const std::uint8_t> bytes);

}  // namespace simstudy
