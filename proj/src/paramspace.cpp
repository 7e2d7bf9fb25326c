#include "simstudy/paramspace.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "simstudy/errors.hpp"

namespace simstudy {

ParamSpace::ParamSpace(std::initializer_list<Axis> axes) : axes_(axes) { validate(); }

ParamSpace::ParamSpace(std::vector<Axis> axes) : axes_(std::move(axes)) { validate(); }

void ParamSpace::validate() const {
    std::set<std::string, std::less<>> names;
    for (const auto& axis : axes_) {
        if (axis.name.empty()) throw InvalidSpaceError("axis name must be non-empty");
        if (!names.insert(axis.name).second)
            throw InvalidSpaceError("duplicate axis name '" + axis.name + "'");
        if (axis.values.empty()) throw InvalidSpaceError("axis '" + axis.name + "' has no values");
        const ValueKind kind = axis.values.front().kind();
        for (std::size_t i = 0; i < axis.values.size(); ++i) {
            if (axis.values[i].kind() != kind)
                throw InvalidSpaceError("axis '" + axis.name + "' mixes value types");
            for (std::size_t j = 0; j < i; ++j) {
                if (axis.values[j] == axis.values[i])
                    throw InvalidSpaceError("axis '" + axis.name + "' has duplicate value " +
                                            axis.values[i].str());
            }
        }
    }
}

const Axis* ParamSpace::find(std::string_view name) const noexcept {
    auto it = std::find_if(axes_.begin(), axes_.end(), [&](const Axis& a) { return a.name == name; });
    return it == axes_.end() ? nullptr : &*it;
}

ValueKind ParamSpace::kind_of(std::string_view name) const {
    const Axis* axis = find(name);
    if (!axis) throw InvalidSpaceError("unknown axis '" + std::string(name) + "'");
    return axis->values.front().kind();
}

std::size_t ParamSpace::cardinality() const noexcept {
    if (axes_.empty()) return 0;
    std::size_t n = 1;
    for (const auto& axis : axes_) n *= axis.values.size();
    return n;
}

Configuration::Configuration(std::initializer_list<Assignment> assignments)
    : Configuration(std::vector<Assignment>(assignments)) {}

Configuration::Configuration(std::vector<Assignment> assignments) : items_(std::move(assignments)) {
    for (std::size_t i = 0; i < items_.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (items_[i].first == items_[j].first)
                throw InvalidSpaceError("configuration assigns '" + items_[i].first + "' twice");
}

bool Configuration::contains(std::string_view name) const noexcept { return find(name) != nullptr; }

const Value* Configuration::find(std::string_view name) const noexcept {
    for (const auto& [k, v] : items_)
        if (k == name) return &v;
    return nullptr;
}

const Value& Configuration::at(std::string_view name) const {
    if (const Value* v = find(name)) return *v;
    throw InvalidSpaceError("configuration has no axis '" + std::string(name) + "'");
}

Configuration Configuration::project(const std::vector<std::string>& names) const {
    std::vector<Assignment> out;
    out.reserve(names.size());
    for (const auto& n : names) out.emplace_back(n, at(n));
    return Configuration(std::move(out));
}

bool Configuration::matches(const Configuration& selection) const {
    return std::all_of(selection.items_.begin(), selection.items_.end(), [&](const Assignment& a) {
        const Value* v = find(a.first);
        return v && *v == a.second;
    });
}

std::string Configuration::str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) os << ", ";
        os << items_[i].first << '=' << items_[i].second;
    }
    return os.str();
}

bool operator==(const Configuration& a, const Configuration& b) {
    return a.size() == b.size() && a.matches(b);
}

std::ostream& operator<<(std::ostream& os, const Configuration& c) { return os << c.str(); }

std::vector<Configuration> cartesian_product(const ParamSpace& space) {
    const auto& axes = space.axes();
    if (axes.empty()) throw InvalidSpaceError("parameter space has no axes");
    for (const auto& axis : axes)
        if (axis.values.empty()) throw InvalidSpaceError("axis '" + axis.name + "' has no values");

    std::vector<Configuration> out;
    out.reserve(space.cardinality());
    std::vector<std::size_t> index(axes.size(), 0);
    while (true) {
        std::vector<Configuration::Assignment> items;
        items.reserve(axes.size());
        for (std::size_t a = 0; a < axes.size(); ++a) items.emplace_back(axes[a].name, axes[a].values[index[a]]);
        out.emplace_back(std::move(items));

        // odometer increment, last axis fastest
        std::size_t a = axes.size();
        while (a > 0) {
            --a;
            if (++index[a] < axes[a].values.size()) break;
            index[a] = 0;
            if (a == 0) return out;
        }
    }
}

std::vector<Configuration> apply_filter(const std::vector<Configuration>& configs,
                                        const FilterPredicate& keep) {
    if (!keep) return configs;
    std::vector<Configuration> out;
    std::copy_if(configs.begin(), configs.end(), std::back_inserter(out), keep);
    return out;
}

}  // namespace simstudy
