#include <gtest/gtest.h>

#include <random>

#include "autohybrid/config_space.hpp"
#include "autohybrid/error.hpp"
#include "autohybrid/hybrid_space.hpp"

using namespace autohybrid;

namespace {

ConfigurationSpace kernel_space() {
    return ConfigurationSpace({ParameterSpec::categorical("kernel", {"rbf", "poly"}),
                               ParameterSpec::grid("degree", {2, 3}, Condition{"kernel", "poly"})});
}

Configuration cfg(std::initializer_list<std::pair<const std::string, Value>> kv) {
    return Configuration{std::map<std::string, Value>(kv)};
}

// Size predicted by summing over root-choice combinations.
std::size_t expected_grid_size(const ConfigurationSpace& space) {
    std::size_t total = 0;
    std::function<void(std::size_t, Configuration, std::size_t)> walk =
        [&](std::size_t i, Configuration c, std::size_t prod) {
            if (i == space.size()) {
                total += prod;
                return;
            }
            const auto& p = space.parameters()[i];
            if (p.condition && (!c.has(p.condition->parent) ||
                                c.label(p.condition->parent) != p.condition->equals)) {
                walk(i + 1, c, prod);
                return;
            }
            if (const auto* cat = std::get_if<Categorical>(&p.domain)) {
                for (const auto& l : cat->labels) {
                    auto next = c;
                    next.set(p.name, l);
                    walk(i + 1, next, prod);
                }
            } else {
                walk(i + 1, c, prod * p.cardinality());
            }
        };
    walk(0, {}, 1);
    return total;
}

ConfigurationSpace fuzz_space(std::mt19937_64& rng) {
    std::vector<ParameterSpec> params;
    std::vector<std::size_t> categoricals;
    const int n = std::uniform_int_distribution<int>(1, 6)(rng);
    for (int i = 0; i < n; ++i) {
        std::optional<Condition> cond;
        if (!categoricals.empty() && rng() % 2) {
            const auto& parent = params[categoricals[rng() % categoricals.size()]];
            const auto& labels = std::get<Categorical>(parent.domain).labels;
            cond = Condition{parent.name, labels[rng() % labels.size()]};
        }
        const auto name = "p" + std::to_string(i);
        switch (rng() % 4) {
        case 0:
            categoricals.push_back(params.size());
            params.push_back(ParameterSpec::categorical(name, {"a", "b", "c"}, cond));
            break;
        case 1: params.push_back(ParameterSpec::grid(name, {1, 2.5, 7}, cond)); break;
        case 2: params.push_back(ParameterSpec::uniform(name, -1, 3, cond)); break;
        default: params.push_back(ParameterSpec::log_uniform(name, 0.01, 10, cond)); break;
        }
    }
    return ConfigurationSpace(std::move(params));
}

} // namespace

TEST(Validate, InactiveBranchOmitted) { EXPECT_FALSE(validate(kernel_space(), cfg({{"kernel", "rbf"}}))); }

TEST(Validate, InactiveParameterPresent) {
    const auto v = validate(kernel_space(), cfg({{"kernel", "rbf"}, {"degree", 2.0}}));
    ASSERT_TRUE(v);
    EXPECT_EQ(v->rule, "inactive");
    EXPECT_EQ(v->parameter, "degree");
}

TEST(Validate, ValueOutsideDomain) {
    const auto v = validate(kernel_space(), cfg({{"kernel", "poly"}, {"degree", 5.0}}));
    ASSERT_TRUE(v);
    EXPECT_EQ(v->rule, "value outside domain");
}

TEST(Validate, MissingAndUnknown) {
    const auto missing = validate(kernel_space(), cfg({{"kernel", "poly"}}));
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->rule, "missing");
    const auto unknown = validate(kernel_space(), cfg({{"kernel", "rbf"}, {"gamma", 1.0}}));
    ASSERT_TRUE(unknown);
    EXPECT_EQ(unknown->rule, "unknown parameter");
}

TEST(Space, RejectsMalformed) {
    EXPECT_THROW(ConfigurationSpace({ParameterSpec::uniform("a", 1, 1)}), InvalidSpace);
    EXPECT_THROW(ConfigurationSpace({ParameterSpec::log_uniform("a", 0, 1)}), InvalidSpace);
    EXPECT_THROW(ConfigurationSpace({ParameterSpec::grid("a", {2, 1})}), InvalidSpace);
    EXPECT_THROW(ConfigurationSpace({ParameterSpec::categorical("a", {"x", "x"})}), InvalidSpace);
    EXPECT_THROW(ConfigurationSpace({ParameterSpec::categorical("a", {})}), InvalidSpace);
    EXPECT_THROW(ConfigurationSpace({ParameterSpec::grid("a", {1}), ParameterSpec::grid("a", {2})}),
                 InvalidSpace);
    EXPECT_THROW(ConfigurationSpace({ParameterSpec::grid("d", {1}, Condition{"k", "x"})}), InvalidSpace);
    EXPECT_THROW(ConfigurationSpace({ParameterSpec::grid("k", {1, 2}),
                                     ParameterSpec::grid("d", {1}, Condition{"k", "x"})}),
                 InvalidSpace);
}

TEST(Enumerate, CartesianProduct) {
    const ConfigurationSpace s({ParameterSpec::grid("a", {1, 2}), ParameterSpec::grid_labels("b", {"x", "y"})});
    const auto all = enumerate_grid(s);
    ASSERT_EQ(all.size(), 4u);
    EXPECT_EQ(all[0], cfg({{"a", 1.0}, {"b", "x"}}));
    EXPECT_EQ(all[1], cfg({{"a", 1.0}, {"b", "y"}}));
    EXPECT_EQ(all[3], cfg({{"a", 2.0}, {"b", "y"}}));
}

TEST(Enumerate, ConditionalBranches) {
    const auto all = enumerate_grid(kernel_space());
    ASSERT_EQ(all.size(), 3u);
    EXPECT_EQ(all[0], cfg({{"kernel", "rbf"}}));
    for (const auto& c : all) EXPECT_FALSE(validate(kernel_space(), c));
}

TEST(Enumerate, DefaultGrids) {
    const auto predictors = enumerate_grid(predictor_grid_space());
    EXPECT_EQ(predictors.size(), 64u);
    std::map<std::string, int> per;
    for (const auto& c : predictors) ++per[c.label("algorithm")];
    EXPECT_EQ(per["MLP"], 18);
    EXPECT_EQ(per["SVR"], 13);
    EXPECT_EQ(per["GBM"], 16);
    EXPECT_EQ(per["RF"], 16);
    EXPECT_EQ(per["LR"], 1);
    EXPECT_EQ(enumerate_grid(decider_grid_space()).size(), 15u);
}

TEST(Enumerate, ContinuousIsNonEnumerable) {
    EXPECT_THROW(enumerate_grid(hybrid_tpe_space()), NonEnumerable);
    const ConfigurationSpace s({ParameterSpec::categorical("k", {"a", "b"}),
                                ParameterSpec::uniform("u", 0, 1, Condition{"k", "b"})});
    EXPECT_THROW(enumerate_grid(s), NonEnumerable);
}

TEST(Sample, Deterministic) {
    const auto s = hybrid_tpe_space();
    EXPECT_EQ(sample_random(s, 42), sample_random(s, 42));
}

TEST(Sample, CategoricalFrequencies) {
    const ConfigurationSpace s({ParameterSpec::categorical("c", {"A", "B"})});
    int a = 0;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) a += sample_random(s, seed).label("c") == "A";
    EXPECT_NEAR(a / 10000.0, 0.5, 0.02);
}

TEST(Sample, LogUniformIsUniformInLog) {
    const ConfigurationSpace s({ParameterSpec::log_uniform("x", 0.01, 100)});
    int below_one = 0;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) below_one += sample_random(s, seed).number("x") < 1.0;
    EXPECT_NEAR(below_one / 10000.0, 0.5, 0.02);
}

TEST(Sample, AlwaysValidatesFuzzed) {
    std::mt19937_64 rng(5);
    for (int s = 0; s < 1000; ++s) {
        const auto space = fuzz_space(rng);
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto c = sample_random(space, seed);
            ASSERT_FALSE(validate(space, c)) << to_string(c);
        }
    }
}

TEST(Enumerate, SizeFormulaFuzzed) {
    std::mt19937_64 rng(9);
    int checked = 0;
    for (int s = 0; s < 500; ++s) {
        const auto space = fuzz_space(rng);
        std::vector<Configuration> all;
        try {
            all = enumerate_grid(space);
        } catch (const NonEnumerable&) {
            continue;
        }
        ++checked;
        EXPECT_EQ(all.size(), expected_grid_size(space));
        for (const auto& c : all) ASSERT_FALSE(validate(space, c));
    }
    EXPECT_GT(checked, 50);
}

TEST(Active, Examples) {
    const auto s = kernel_space();
    EXPECT_EQ(active_parameters(s, cfg({{"kernel", "poly"}})), (std::set<std::string>{"kernel", "degree"}));
    EXPECT_EQ(active_parameters(s, cfg({{"kernel", "rbf"}})), (std::set<std::string>{"kernel"}));
    EXPECT_THROW(active_parameters(s, Configuration{}), UnresolvedParent);
}

TEST(Active, HybridSpace) {
    const auto s = hybrid_tpe_space();
    const auto act = active_parameters(
        s, cfg({{"interpolator", "MLP"}, {"extrapolator", "LR"}, {"decider", "1C-SVM"}}));
    EXPECT_EQ(act, (std::set<std::string>{"interpolator", "interp_n_neurons", "extrapolator", "decider",
                                          "decider_sigma"}));
}

TEST(Active, Monotone) {
    const ConfigurationSpace s({ParameterSpec::categorical("a", {"x", "y"}),
                                ParameterSpec::grid("b", {1}, Condition{"a", "x"}),
                                ParameterSpec::categorical("c", {"u", "v"}),
                                ParameterSpec::grid("d", {1}, Condition{"c", "u"})});
    const auto before = active_parameters(s, cfg({{"a", "x"}, {"c", "v"}}));
    const auto after = active_parameters(s, cfg({{"a", "x"}, {"c", "u"}}));
    for (const auto& p : before) EXPECT_TRUE(after.count(p)) << p;
}

TEST(Json, SpaceRoundTrip) {
    for (const auto& s : {kernel_space(), hybrid_tpe_space(), predictor_grid_space()}) {
        const auto j = to_json(s);
        EXPECT_EQ(to_json(space_from_json(j)), j);
    }
    const auto j = nlohmann::json::parse(R"([{"name":"k","type":"categorical","values":["a","b"]},
        {"name":"s","type":"loguniform","low":0.01,"high":10,"condition":{"parent":"k","equals":"b"}}])");
    const auto s = space_from_json(j);
    EXPECT_TRUE(std::get<ContinuousRange>(s.at("s").domain).log_scale);
    EXPECT_EQ(s.at("s").condition->equals, "b");
}

TEST(Json, ConfigurationRoundTrip) {
    const auto c = sample_random(hybrid_tpe_space(), 3);
    EXPECT_EQ(configuration_from_json(to_json(c)), c);
}
