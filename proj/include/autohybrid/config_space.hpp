#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace autohybrid {

/// A hyperparameter value: a number or a label.
using Value = std::variant<double, std::string>;

std::string to_string(const Value& v);

/// Finite ordered list of numbers or labels (never mixed).
struct GridValues {
    std::vector<Value> values;
};

struct ContinuousRange {
    double low = 0.0;
    double high = 1.0;
    bool log_scale = false;
};

struct Categorical {
    std::vector<std::string> labels;
};

using Domain = std::variant<GridValues, ContinuousRange, Categorical>;

/// Activation rule: the parameter exists only while `parent` takes the label `equals`.
struct Condition {
    std::string parent;
    std::string equals;

    friend bool operator==(const Condition&, const Condition&) = default;
};

struct ParameterSpec {
    std::string name;
    Domain domain;
    std::optional<Condition> condition;

    static ParameterSpec grid(std::string name, std::vector<double> values,
                              std::optional<Condition> condition = std::nullopt);
    static ParameterSpec grid_labels(std::string name, std::vector<std::string> labels,
                                     std::optional<Condition> condition = std::nullopt);
    static ParameterSpec uniform(std::string name, double low, double high,
                                 std::optional<Condition> condition = std::nullopt);
    static ParameterSpec log_uniform(std::string name, double low, double high,
                                     std::optional<Condition> condition = std::nullopt);
    static ParameterSpec categorical(std::string name, std::vector<std::string> labels,
                                     std::optional<Condition> condition = std::nullopt);

    bool is_finite() const noexcept { return !std::holds_alternative<ContinuousRange>(domain); }
    /// Number of choices of a finite domain; 0 for continuous ranges.
    std::size_t cardinality() const noexcept;
    bool contains(const Value& v) const;
};

/// A point in a configuration space. Ordered by name so serialization is stable.
struct Configuration {
    std::map<std::string, Value> assignments;

    bool has(const std::string& name) const { return assignments.count(name) != 0; }
    double number(const std::string& name) const;
    const std::string& label(const std::string& name) const;
    void set(const std::string& name, Value v) { assignments[name] = std::move(v); }

    friend bool operator==(const Configuration&, const Configuration&) = default;
};

std::string to_string(const Configuration& cfg);

/// Tree-structured space: every condition refers to a categorical parameter
/// declared earlier, so condition edges always form a forest. Immutable.
class ConfigurationSpace {
public:
    ConfigurationSpace() = default;
    /// Throws InvalidSpace when an invariant is violated.
    explicit ConfigurationSpace(std::vector<ParameterSpec> parameters);

    const std::vector<ParameterSpec>& parameters() const noexcept { return parameters_; }
    std::size_t size() const noexcept { return parameters_.size(); }
    std::optional<std::size_t> index_of(const std::string& name) const;
    const ParameterSpec& at(const std::string& name) const;

    /// Index of the parent parameter, if conditional.
    std::optional<std::size_t> parent_index(std::size_t i) const { return parents_[i]; }

private:
    std::vector<ParameterSpec> parameters_;
    std::vector<std::optional<std::size_t>> parents_;
    std::map<std::string, std::size_t> index_;
};

struct Violation {
    std::string rule;     // "unknown parameter", "missing", "inactive", "value outside domain"
    std::string parameter;
    std::string message;
};

/// Returns the first violated rule, or nullopt when `cfg` is a valid point of `space`.
std::optional<Violation> validate(const ConfigurationSpace& space, const Configuration& cfg);

/// Cartesian product over active branches, in declaration-then-domain order
/// (the first declared parameter varies slowest).
std::vector<Configuration> enumerate_grid(const ConfigurationSpace& space);

/// Uniform over finite choices, (log-)uniform over ranges; inactive children are
/// never sampled. Deterministic per seed.
Configuration sample_random(const ConfigurationSpace& space, std::uint64_t seed);

/// Parameters whose condition chain is satisfied by `partial`.
/// Throws UnresolvedParent when an active parent has no assignment.
std::set<std::string> active_parameters(const ConfigurationSpace& space,
                                        const Configuration& partial);

// JSON form: [{"name", "type": "grid"|"uniform"|"loguniform"|"categorical",
//              "values" | "low"+"high", "condition": {"parent", "equals"}}]
nlohmann::json to_json(const ConfigurationSpace& space);
ConfigurationSpace space_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Configuration& cfg);
Configuration configuration_from_json(const nlohmann::json& j);

} // namespace autohybrid
