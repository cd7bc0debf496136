#include "autohybrid/config_space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "autohybrid/error.hpp"
#include "autohybrid/random.hpp"

namespace autohybrid {

std::string to_string(const Value& v) {
    if (const auto* d = std::get_if<double>(&v)) {
        return fmt::format("{}", *d);
    }
    return std::get<std::string>(v);
}

std::string to_string(const Configuration& cfg) {
    std::string out = "{";
    bool first = true;
    for (const auto& [name, value] : cfg.assignments) {
        out += fmt::format("{}{}={}", first ? "" : ", ", name, to_string(value));
        first = false;
    }
    return out + "}";
}

ParameterSpec ParameterSpec::grid(std::string name, std::vector<double> values,
                                  std::optional<Condition> condition) {
    GridValues g;
    g.values.assign(values.begin(), values.end());
    return {std::move(name), std::move(g), std::move(condition)};
}

ParameterSpec ParameterSpec::grid_labels(std::string name, std::vector<std::string> labels,
                                         std::optional<Condition> condition) {
    GridValues g;
    g.values.assign(labels.begin(), labels.end());
    return {std::move(name), std::move(g), std::move(condition)};
}

ParameterSpec ParameterSpec::uniform(std::string name, double low, double high,
                                     std::optional<Condition> condition) {
    return {std::move(name), ContinuousRange{low, high, false}, std::move(condition)};
}

ParameterSpec ParameterSpec::log_uniform(std::string name, double low, double high,
                                         std::optional<Condition> condition) {
    return {std::move(name), ContinuousRange{low, high, true}, std::move(condition)};
}

ParameterSpec ParameterSpec::categorical(std::string name, std::vector<std::string> labels,
                                         std::optional<Condition> condition) {
    return {std::move(name), Categorical{std::move(labels)}, std::move(condition)};
}

std::size_t ParameterSpec::cardinality() const noexcept {
    if (const auto* g = std::get_if<GridValues>(&domain)) return g->values.size();
    if (const auto* c = std::get_if<Categorical>(&domain)) return c->labels.size();
    return 0;
}

bool ParameterSpec::contains(const Value& v) const {
    return std::visit(
        [&](const auto& d) -> bool {
            using D = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<D, GridValues>) {
                return std::find(d.values.begin(), d.values.end(), v) != d.values.end();
            } else if constexpr (std::is_same_v<D, ContinuousRange>) {
                const auto* x = std::get_if<double>(&v);
                return x != nullptr && *x >= d.low && *x <= d.high;
            } else {
                const auto* s = std::get_if<std::string>(&v);
                return s != nullptr &&
                       std::find(d.labels.begin(), d.labels.end(), *s) != d.labels.end();
            }
        },
        domain);
}

double Configuration::number(const std::string& name) const {
    auto it = assignments.find(name);
    if (it == assignments.end()) throw InvalidConfig("missing parameter '" + name + "'");
    const auto* d = std::get_if<double>(&it->second);
    if (d == nullptr) throw InvalidConfig("parameter '" + name + "' is not numeric");
    return *d;
}

const std::string& Configuration::label(const std::string& name) const {
    auto it = assignments.find(name);
    if (it == assignments.end()) throw InvalidConfig("missing parameter '" + name + "'");
    const auto* s = std::get_if<std::string>(&it->second);
    if (s == nullptr) throw InvalidConfig("parameter '" + name + "' is not a label");
    return *s;
}

namespace {

void check_domain(const ParameterSpec& p) {
    std::visit(
        [&](const auto& d) {
            using D = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<D, GridValues>) {
                if (d.values.empty()) throw InvalidSpace("grid '" + p.name + "' is empty");
                const bool numeric = std::holds_alternative<double>(d.values.front());
                for (std::size_t i = 0; i < d.values.size(); ++i) {
                    if (std::holds_alternative<double>(d.values[i]) != numeric)
                        throw InvalidSpace("grid '" + p.name + "' mixes numbers and labels");
                    if (numeric) {
                        const double x = std::get<double>(d.values[i]);
                        if (!std::isfinite(x))
                            throw InvalidSpace("grid '" + p.name + "' has a non-finite value");
                        if (i > 0 && !(std::get<double>(d.values[i - 1]) < x))
                            throw InvalidSpace("grid '" + p.name + "' is not strictly increasing");
                    } else {
                        for (std::size_t j = 0; j < i; ++j)
                            if (d.values[j] == d.values[i])
                                throw InvalidSpace("grid '" + p.name + "' has duplicate labels");
                    }
                }
            } else if constexpr (std::is_same_v<D, ContinuousRange>) {
                if (!std::isfinite(d.low) || !std::isfinite(d.high) || !(d.low < d.high))
                    throw InvalidSpace("range '" + p.name + "' requires low < high");
                if (d.log_scale && !(d.low > 0.0))
                    throw InvalidSpace("log range '" + p.name + "' requires low > 0");
            } else {
                if (d.labels.empty()) throw InvalidSpace("categorical '" + p.name + "' is empty");
                for (std::size_t i = 0; i < d.labels.size(); ++i)
                    for (std::size_t j = 0; j < i; ++j)
                        if (d.labels[i] == d.labels[j])
                            throw InvalidSpace("categorical '" + p.name + "' has duplicates");
            }
        },
        p.domain);
}

/// Active iff the whole condition chain holds. Parents precede children, so
/// `active` already holds the parent's state when a child is visited.
bool is_active(const ConfigurationSpace& space, std::size_t i, const std::vector<char>& active,
               const Configuration& cfg, bool require_parent) {
    const auto parent = space.parent_index(i);
    if (!parent) return true;
    if (!active[*parent]) return false;
    const auto& p = space.parameters()[i];
    auto it = cfg.assignments.find(p.condition->parent);
    if (it == cfg.assignments.end()) {
        if (require_parent)
            throw UnresolvedParent("parent '" + p.condition->parent + "' of '" + p.name +
                                   "' is unassigned");
        return false;
    }
    const auto* label = std::get_if<std::string>(&it->second);
    return label != nullptr && *label == p.condition->equals;
}

Value draw(const ParameterSpec& p, Rng& rng) {
    return std::visit(
        [&](const auto& d) -> Value {
            using D = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<D, GridValues>) {
                std::uniform_int_distribution<std::size_t> pick(0, d.values.size() - 1);
                return d.values[pick(rng)];
            } else if constexpr (std::is_same_v<D, ContinuousRange>) {
                if (d.log_scale) {
                    std::uniform_real_distribution<double> u(std::log(d.low), std::log(d.high));
                    return std::clamp(std::exp(u(rng)), d.low, d.high);
                }
                std::uniform_real_distribution<double> u(d.low, d.high);
                return u(rng);
            } else {
                std::uniform_int_distribution<std::size_t> pick(0, d.labels.size() - 1);
                return d.labels[pick(rng)];
            }
        },
        p.domain);
}

} // namespace

ConfigurationSpace::ConfigurationSpace(std::vector<ParameterSpec> parameters)
    : parameters_(std::move(parameters)) {
    parents_.resize(parameters_.size());
    for (std::size_t i = 0; i < parameters_.size(); ++i) {
        const auto& p = parameters_[i];
        if (p.name.empty()) throw InvalidSpace("parameter without a name");
        if (!index_.emplace(p.name, i).second)
            throw InvalidSpace("duplicate parameter '" + p.name + "'");
        check_domain(p);
        if (p.condition) {
            auto it = index_.find(p.condition->parent);
            if (it == index_.end() || it->second == i)
                throw InvalidSpace("condition of '" + p.name + "' refers to '" +
                                   p.condition->parent + "', which is not declared before it");
            const auto* cat = std::get_if<Categorical>(&parameters_[it->second].domain);
            if (cat == nullptr)
                throw InvalidSpace("condition parent '" + p.condition->parent +
                                   "' is not categorical");
            if (std::find(cat->labels.begin(), cat->labels.end(), p.condition->equals) ==
                cat->labels.end())
                throw InvalidSpace("condition of '" + p.name + "' requires unknown label '" +
                                   p.condition->equals + "'");
            parents_[i] = it->second;
        }
    }
}

std::optional<std::size_t> ConfigurationSpace::index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const ParameterSpec& ConfigurationSpace::at(const std::string& name) const {
    auto idx = index_of(name);
    if (!idx) throw InvalidConfig("unknown parameter '" + name + "'");
    return parameters_[*idx];
}

std::optional<Violation> validate(const ConfigurationSpace& space, const Configuration& cfg) {
    for (const auto& [name, value] : cfg.assignments) {
        if (!space.index_of(name))
            return Violation{"unknown parameter", name, name + " unknown"};
    }
    const auto& params = space.parameters();
    std::vector<char> active(params.size(), 0);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& p = params[i];
        active[i] = is_active(space, i, active, cfg, false);
        auto it = cfg.assignments.find(p.name);
        if (active[i] && it == cfg.assignments.end())
            return Violation{"missing", p.name, p.name + " missing"};
        if (!active[i] && it != cfg.assignments.end())
            return Violation{"inactive", p.name, p.name + " inactive"};
        if (it != cfg.assignments.end() && !p.contains(it->second))
            return Violation{"value outside domain", p.name,
                             p.name + ": value outside domain (" + to_string(it->second) + ")"};
    }
    return std::nullopt;
}

std::vector<Configuration> enumerate_grid(const ConfigurationSpace& space) {
    const auto& params = space.parameters();
    std::vector<Configuration> out;
    Configuration current;
    std::vector<char> active(params.size(), 0);

    std::function<void(std::size_t)> recurse = [&](std::size_t i) {
        if (i == params.size()) {
            out.push_back(current);
            return;
        }
        active[i] = is_active(space, i, active, current, false);
        if (!active[i]) {
            recurse(i + 1);
            return;
        }
        const auto& p = params[i];
        if (const auto* g = std::get_if<GridValues>(&p.domain)) {
            for (const auto& v : g->values) {
                current.set(p.name, v);
                recurse(i + 1);
            }
        } else if (const auto* c = std::get_if<Categorical>(&p.domain)) {
            for (const auto& label : c->labels) {
                current.set(p.name, label);
                recurse(i + 1);
            }
        } else {
            throw NonEnumerable("parameter '" + p.name + "' has a continuous domain");
        }
        current.assignments.erase(p.name);
    };
    recurse(0);
    return out;
}

Configuration sample_random(const ConfigurationSpace& space, std::uint64_t seed) {
    Rng rng(seed);
    const auto& params = space.parameters();
    Configuration cfg;
    std::vector<char> active(params.size(), 0);
    for (std::size_t i = 0; i < params.size(); ++i) {
        active[i] = is_active(space, i, active, cfg, false);
        if (active[i]) cfg.set(params[i].name, draw(params[i], rng));
    }
    return cfg;
}

std::set<std::string> active_parameters(const ConfigurationSpace& space,
                                        const Configuration& partial) {
    const auto& params = space.parameters();
    std::set<std::string> out;
    std::vector<char> active(params.size(), 0);
    for (std::size_t i = 0; i < params.size(); ++i) {
        active[i] = is_active(space, i, active, partial, true);
        if (active[i]) out.insert(params[i].name);
    }
    return out;
}

namespace {

nlohmann::json value_json(const Value& v) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    return std::get<std::string>(v);
}

Value value_from_json(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    throw ParseError("expected a number or a string, got " + j.dump());
}

} // namespace

nlohmann::json to_json(const ConfigurationSpace& space) {
    auto arr = nlohmann::json::array();
    for (const auto& p : space.parameters()) {
        nlohmann::json o;
        o["name"] = p.name;
        std::visit(
            [&](const auto& d) {
                using D = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<D, GridValues>) {
                    o["type"] = "grid";
                    o["values"] = nlohmann::json::array();
                    for (const auto& v : d.values) o["values"].push_back(value_json(v));
                } else if constexpr (std::is_same_v<D, ContinuousRange>) {
                    o["type"] = d.log_scale ? "loguniform" : "uniform";
                    o["low"] = d.low;
                    o["high"] = d.high;
                } else {
                    o["type"] = "categorical";
                    o["values"] = d.labels;
                }
            },
            p.domain);
        if (p.condition) o["condition"] = {{"parent", p.condition->parent},
                                           {"equals", p.condition->equals}};
        arr.push_back(std::move(o));
    }
    return arr;
}

ConfigurationSpace space_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw ParseError("configuration space must be a JSON array");
    std::vector<ParameterSpec> params;
    try {
        for (const auto& o : j) {
            ParameterSpec p;
            p.name = o.at("name").get<std::string>();
            const auto type = o.at("type").get<std::string>();
            if (type == "grid") {
                GridValues g;
                for (const auto& v : o.at("values")) g.values.push_back(value_from_json(v));
                p.domain = std::move(g);
            } else if (type == "uniform" || type == "loguniform") {
                p.domain = ContinuousRange{o.at("low").get<double>(), o.at("high").get<double>(),
                                           type == "loguniform"};
            } else if (type == "categorical") {
                p.domain = Categorical{o.at("values").get<std::vector<std::string>>()};
            } else {
                throw ParseError("unknown parameter type '" + type + "'");
            }
            if (o.contains("condition")) {
                const auto& c = o.at("condition");
                p.condition = Condition{c.at("parent").get<std::string>(),
                                        c.at("equals").get<std::string>()};
            }
            params.push_back(std::move(p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed configuration space: ") + e.what());
    }
    return ConfigurationSpace(std::move(params));
}

nlohmann::json to_json(const Configuration& cfg) {
    nlohmann::json o = nlohmann::json::object();
    for (const auto& [name, value] : cfg.assignments) o[name] = value_json(value);
    return o;
}

Configuration configuration_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("configuration must be a JSON object");
    Configuration cfg;
    for (const auto& [name, value] : j.items()) cfg.set(name, value_from_json(value));
    return cfg;
}

} // namespace autohybrid
