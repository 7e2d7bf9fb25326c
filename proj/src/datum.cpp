#include "simstudy/datum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "simstudy/errors.hpp"

namespace simstudy {

namespace {

constexpr int kMaxDepth = 256;

enum Major : std::uint8_t {
    kUnsigned = 0,
    kNegative = 1,
    kByteString = 2,
    kTextString = 3,
    kArray = 4,
    kMap = 5,
    kTag = 6,
    kSimple = 7,
};

void put_head(Bytes& out, std::uint8_t major, std::uint64_t arg) {
    const auto m = static_cast<std::uint8_t>(major << 5);
    if (arg < 24) {
        out.push_back(m | static_cast<std::uint8_t>(arg));
        return;
    }
    int width;
    std::uint8_t info;
    if (arg <= 0xff) { width = 1; info = 24; }
    else if (arg <= 0xffff) { width = 2; info = 25; }
    else if (arg <= 0xffffffffULL) { width = 4; info = 26; }
    else { width = 8; info = 27; }
    out.push_back(m | info);
    for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(arg >> (8 * i)));
}

void encode(const Datum& d, Bytes& out, int depth);

void encode_text(const std::string& s, Bytes& out) {
    put_head(out, kTextString, s.size());
    out.insert(out.end(), s.begin(), s.end());
}

void encode(const Datum& d, Bytes& out, int depth) {
    if (depth > kMaxDepth) throw BlobError("blob nesting deeper than 256 levels");
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::nullptr_t>) {
                out.push_back(0xf6);
            } else if constexpr (std::is_same_v<T, bool>) {
                out.push_back(v ? 0xf5 : 0xf4);
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                if (v >= 0) put_head(out, kUnsigned, static_cast<std::uint64_t>(v));
                else put_head(out, kNegative, static_cast<std::uint64_t>(-(v + 1)));
            } else if constexpr (std::is_same_v<T, double>) {
                out.push_back(0xfb);
                const auto bits = std::bit_cast<std::uint64_t>(v);
                for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
            } else if constexpr (std::is_same_v<T, std::string>) {
                encode_text(v, out);
            } else if constexpr (std::is_same_v<T, Bytes>) {
                put_head(out, kByteString, v.size());
                out.insert(out.end(), v.begin(), v.end());
            } else if constexpr (std::is_same_v<T, Datum::List>) {
                put_head(out, kArray, v.size());
                for (const auto& item : v) encode(item, out, depth + 1);
            } else if constexpr (std::is_same_v<T, Datum::Map>) {
                // deterministic order: bytewise over encoded keys
                std::vector<std::pair<Bytes, const Datum*>> entries;
                entries.reserve(v.size());
                for (const auto& [k, item] : v) {
                    Bytes key;
                    encode_text(k, key);
                    entries.emplace_back(std::move(key), &item);
                }
                std::sort(entries.begin(), entries.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });
                put_head(out, kMap, entries.size());
                for (const auto& [key, item] : entries) {
                    out.insert(out.end(), key.begin(), key.end());
                    encode(*item, out, depth + 1);
                }
            }
        },
        d.storage());
}

class Decoder {
public:
    explicit Decoder(std::span<const std::uint8_t> in) : in_(in) {}

    Datum value(int depth) {
        if (depth > kMaxDepth) throw BlobError("blob nesting deeper than 256 levels");
        const std::uint8_t initial = byte();
        const std::uint8_t major = initial >> 5;
        const std::uint8_t info = initial & 0x1f;

        if (major == kSimple) return simple(info);
        if (major == kTag) throw BlobError("CBOR tags are not supported");
        const std::uint64_t arg = argument(info);

        switch (major) {
            case kUnsigned:
                if (arg > static_cast<std::uint64_t>(INT64_MAX)) throw BlobError("integer exceeds 64-bit signed range");
                return Datum(static_cast<std::int64_t>(arg));
            case kNegative:
                if (arg > static_cast<std::uint64_t>(INT64_MAX)) throw BlobError("integer exceeds 64-bit signed range");
                return Datum(-static_cast<std::int64_t>(arg) - 1);
            case kByteString: {
                auto span = take(arg);
                return Datum(Bytes(span.begin(), span.end()));
            }
            case kTextString: return Datum(text(arg));
            case kArray: {
                Datum::List items;
                items.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(arg, remaining())));
                for (std::uint64_t i = 0; i < arg; ++i) items.push_back(value(depth + 1));
                return Datum(std::move(items));
            }
            case kMap: {
                Datum::Map entries;
                entries.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(arg, remaining())));
                for (std::uint64_t i = 0; i < arg; ++i) {
                    const std::uint8_t key_head = peek();
                    if ((key_head >> 5) != kTextString) throw BlobError("map keys must be text strings");
                    byte();
                    std::string key = text(argument(key_head & 0x1f));
                    entries.emplace_back(std::move(key), value(depth + 1));
                }
                return Datum(std::move(entries));
            }
            default: break;
        }
        throw BlobError("unsupported CBOR major type");
    }

    bool done() const noexcept { return pos_ == in_.size(); }

private:
    std::size_t remaining() const noexcept { return in_.size() - pos_; }

    std::uint8_t peek() const {
        if (pos_ >= in_.size()) throw BlobError("truncated blob");
        return in_[pos_];
    }

    std::uint8_t byte() {
        const std::uint8_t b = peek();
        ++pos_;
        return b;
    }

    std::span<const std::uint8_t> take(std::uint64_t n) {
        if (n > remaining()) throw BlobError("truncated blob");
        auto s = in_.subspan(pos_, static_cast<std::size_t>(n));
        pos_ += static_cast<std::size_t>(n);
        return s;
    }

    std::uint64_t uint_be(int width) {
        std::uint64_t v = 0;
        for (auto b : take(static_cast<std::uint64_t>(width))) v = (v << 8) | b;
        return v;
    }

    std::uint64_t argument(std::uint8_t info) {
        if (info < 24) return info;
        switch (info) {
            case 24: return uint_be(1);
            case 25: return uint_be(2);
            case 26: return uint_be(4);
            case 27: return uint_be(8);
            case 31: throw BlobError("indefinite-length items are not supported");
            default: throw BlobError("reserved CBOR additional information");
        }
    }

    std::string text(std::uint64_t n) {
        auto s = take(n);
        return std::string(reinterpret_cast<const char*>(s.data()), s.size());
    }

    Datum simple(std::uint8_t info) {
        switch (info) {
            case 20: return Datum(false);
            case 21: return Datum(true);
            case 22: return Datum(nullptr);
            case 25: return Datum(half_to_double(static_cast<std::uint16_t>(uint_be(2))));
            case 26: return Datum(static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(uint_be(4)))));
            case 27: return Datum(std::bit_cast<double>(uint_be(8)));
            default: throw BlobError("unsupported CBOR simple value");
        }
    }

    static double half_to_double(std::uint16_t h) {
        const int exp = (h >> 10) & 0x1f;
        const int mant = h & 0x3ff;
        double v;
        if (exp == 0) v = std::ldexp(mant, -24);
        else if (exp != 31) v = std::ldexp(mant + 1024, exp - 25);
        else v = mant == 0 ? INFINITY : NAN;
        return (h & 0x8000) ? -v : v;
    }

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

}  // namespace

Datum::Datum(Map m) {
    std::sort(m.begin(), m.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < m.size(); ++i)
        if (m[i].first == m[i - 1].first) throw BlobError("duplicate map key '" + m[i].first + "'");
    data_ = std::move(m);
}

Datum Datum::floats(std::span<const double> xs) {
    List items;
    items.reserve(xs.size());
    for (double x : xs) items.emplace_back(x);
    return Datum(std::move(items));
}

const Datum* Datum::find(std::string_view key) const {
    const auto* m = std::get_if<Map>(&data_);
    if (!m) return nullptr;
    auto it = std::lower_bound(m->begin(), m->end(), key,
                               [](const auto& entry, std::string_view k) { return entry.first < k; });
    return (it != m->end() && it->first == key) ? &it->second : nullptr;
}

bool operator==(const Datum& a, const Datum& b) {
    if (a.data_.index() != b.data_.index()) return false;
    if (const auto* x = std::get_if<double>(&a.data_))
        return std::bit_cast<std::uint64_t>(*x) == std::bit_cast<std::uint64_t>(std::get<double>(b.data_));
    return a.data_ == b.data_;
}

Bytes serialize_blob(const Datum& value) {
    Bytes out;
    encode(value, out, 0);
    return out;
}

Datum deserialize_blob(std::span<const std::uint8_t> bytes) {
    Decoder dec(bytes);
    Datum d = dec.value(0);
    if (!dec.done()) throw BlobError("trailing bytes after blob value");
    return d;
}

}  // namespace simstudy
