#pragma once

#include <functional>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "simstudy/value.hpp"

namespace simstudy {

struct Axis {
    std::string name;
    std::vector<Value> values;
};

/// Ordered named axes whose cartesian product is the set of study
/// configurations. Validated on construction and immutable afterwards.
class ParamSpace {
public:
    ParamSpace() = default;
    ParamSpace(std::initializer_list<Axis> axes);
    explicit ParamSpace(std::vector<Axis> axes);

    const std::vector<Axis>& axes() const noexcept { return axes_; }
    std::size_t size() const noexcept { return axes_.size(); }
    const Axis* find(std::string_view name) const noexcept;

    /// Uniform kind of the named axis.
    ValueKind kind_of(std::string_view name) const;

    /// Number of configurations in the product.
    std::size_t cardinality() const noexcept;

private:
    void validate() const;

    std::vector<Axis> axes_;
};

/// One point of a ParamSpace: an assignment per axis in declaration order.
/// Also used for partial selections (a subset of axes).
class Configuration {
public:
    using Assignment = std::pair<std::string, Value>;

    Configuration() = default;
    Configuration(std::initializer_list<Assignment> assignments);
    explicit Configuration(std::vector<Assignment> assignments);

    const std::vector<Assignment>& assignments() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }

    bool contains(std::string_view name) const noexcept;
    const Value& at(std::string_view name) const;
    const Value* find(std::string_view name) const noexcept;

    /// Keeps only the named axes, in the order given.
    Configuration project(const std::vector<std::string>& names) const;

    /// True when every assignment of `selection` is present here with an equal value.
    bool matches(const Configuration& selection) const;

    /// "a=1, b=x"
    std::string str() const;

    /// Order-insensitive by name.
    friend bool operator==(const Configuration& a, const Configuration& b);

private:
    std::vector<Assignment> items_;
};

std::ostream& operator<<(std::ostream& os, const Configuration& c);

/// true = keep.
using FilterPredicate = std::function<bool(const Configuration&)>;

/// Row-major over declaration order: the last axis varies fastest.
std::vector<Configuration> cartesian_product(const ParamSpace& space);

std::vector<Configuration> apply_filter(const std::vector<Configuration>& configs,
                                        const FilterPredicate& keep);

}  // namespace simstudy
