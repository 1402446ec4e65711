#include <gtest/gtest.h>

#include "hydra/dependency_oracle.hpp"
#include "test_support.hpp"

using namespace hydra;

namespace {

std::set<std::string> deps_of(const CodeGraph& g, const std::string& anchor) {
    auto v = analyze_dependencies(g, anchor, candidate_scope(g, anchor));
    return {v.begin(), v.end()};
}

CodeGraph graph_of(const std::map<std::string, std::string>& sources) {
    return build_graph_from_sources("/repo", sources, 1).graph;
}

}  // namespace

TEST(DependencyOracle, MatchesHandLabelsOnFixtures) {
    for (const auto& name : testkit::labeled_fixtures()) {
        auto g = testkit::load_fixture(name);
        for (const auto& [anchor, expected] : testkit::fixture_labels(name)) {
            EXPECT_EQ(deps_of(g, anchor), expected) << name << " " << anchor;
        }
    }
}

TEST(DependencyOracle, EveryFixtureFunctionIsLabeled) {
    for (const auto& name : testkit::labeled_fixtures()) {
        auto g = testkit::load_fixture(name);
        auto labels = testkit::fixture_labels(name);
        for (const auto& u : g.units()) {
            if (u.kind != UnitKind::Function) continue;
            EXPECT_TRUE(labels.count(u.id)) << u.id;
        }
    }
}

TEST(CandidateScope, OwnFileThenImportsWithoutAnchorOrEnclosingClass) {
    auto g = testkit::load_fixture("minirepo");
    auto scope = candidate_scope(g, "utils.py::Formatter.format::Function");
    EXPECT_EQ(scope.candidate_ids,
              (std::vector<std::string>{"utils.py::MAX_LEN::Variable", "utils.py::WORD_RE::Variable",
                                        "utils.py::is_full_string::Function", "utils.py::shorten::Function",
                                        "utils.py::Formatter.camel::Function", "utils.py::Formatter.snake::Function"}));
    auto main_scope = candidate_scope(g, "main.py::is_url::Function");
    EXPECT_EQ(main_scope.candidate_ids.front(), "main.py::render::Function");
    EXPECT_EQ(main_scope.candidate_ids.size(), 1u + 8u);
}

TEST(CandidateScope, KindFilterAndMethods) {
    auto g = testkit::load_fixture("minirepo");
    auto only_vars = candidate_scope(g, "main.py::is_url::Function", {{UnitKind::Variable}, true});
    EXPECT_EQ(only_vars.candidate_ids,
              (std::vector<std::string>{"utils.py::MAX_LEN::Variable", "utils.py::WORD_RE::Variable"}));
    auto no_methods = candidate_scope(g, "main.py::is_url::Function", {all_kinds(), false});
    for (const auto& id : no_methods.candidate_ids) EXPECT_FALSE(g.lookup(id)->is_method()) << id;
}

TEST(CandidateScope, RejectsNonFunctionAnchors) {
    auto g = testkit::load_fixture("minirepo");
    EXPECT_THROW(candidate_scope(g, "utils.py::MAX_LEN::Variable"), std::invalid_argument);
    EXPECT_THROW(candidate_scope(g, "nope.py::f::Function"), std::invalid_argument);
}

TEST(DependencyOracle, FunctionsCountOnlyWhenCalled) {
    auto g = graph_of({{"m.py", "def helper():\n    pass\n\ndef f():\n    cb = helper\n    return cb\n\n"
                                "def g():\n    return helper()\n"}});
    EXPECT_TRUE(deps_of(g, "m.py::f::Function").empty());
    EXPECT_EQ(deps_of(g, "m.py::g::Function"), std::set<std::string>{"m.py::helper::Function"});
}

TEST(DependencyOracle, ClassScopeIsSkippedForNestedFunctions) {
    auto g = graph_of({{"m.py", "X = 1\n\nclass C:\n    X = 2\n\n    def m(self):\n        return X\n"}});
    EXPECT_EQ(deps_of(g, "m.py::C.m::Function"), std::set<std::string>{"m.py::X::Variable"});
}

TEST(DependencyOracle, LambdaDefaultsAndDecoratorsResolveOutside) {
    auto g = graph_of({{"m.py", "D = 1\n\ndef deco(f):\n    return f\n\n"
                                "def f(a=D):\n    @deco\n    def inner(D=D):\n        return D\n"
                                "    return (lambda D: D)(a)\n"}});
    EXPECT_EQ(deps_of(g, "m.py::f::Function"),
              (std::set<std::string>{"m.py::D::Variable", "m.py::deco::Function"}));
}

TEST(DependencyOracle, ModuleAttributeCallsDoNotMatchMethods) {
    auto g = graph_of({{"a.py", "def run():\n    pass\n\nclass Job:\n    def run(self):\n        pass\n"},
                       {"b.py", "import a\n\ndef f(job):\n    a.run()\n    job.run()\n"}});
    EXPECT_EQ(deps_of(g, "b.py::f::Function"),
              (std::set<std::string>{"a.py::run::Function", "a.py::Job.run::Function"}));
}

TEST(DependencyOracle, StoresAreNotLoads) {
    auto g = graph_of({{"m.py",
                        "COUNT = 0\nTOTAL = 0\n\ndef f():\n    global COUNT, TOTAL\n    COUNT = 1\n    TOTAL += 1\n\n"
                        "def g():\n    TOTAL += 1\n"}});
    // A global augmented assignment reads the old value; without the
    // declaration the name is local to g.
    EXPECT_EQ(deps_of(g, "m.py::f::Function"), std::set<std::string>{"m.py::TOTAL::Variable"});
    EXPECT_TRUE(deps_of(g, "m.py::g::Function").empty());
}

TEST(DependencyOracle, AnalyzeSourceUsesReplacementBody) {
    auto g = testkit::load_fixture("minirepo");
    DependencyOracle oracle(g);
    auto scope = candidate_scope(g, "main.py::is_url::Function");
    auto got = oracle.analyze_source(scope, "def is_url(v):\n    return len(v) < MAX_LEN\n");
    ASSERT_TRUE(got.has_value());
    EXPECT_EQ(*got, std::vector<std::string>{"utils.py::MAX_LEN::Variable"});
    auto indented = oracle.analyze_source(scope, "    def is_url(v):\n        return is_full_string(v)\n");
    ASSERT_TRUE(indented.has_value());
    EXPECT_EQ(*indented, std::vector<std::string>{"utils.py::is_full_string::Function"});
    EXPECT_FALSE(oracle.analyze_source(scope, "def is_url(:\n").has_value());
    EXPECT_FALSE(oracle.analyze_source(scope, "x = 1\n").has_value());
}

TEST(Triplets, CoverEveryFunctionWithScope) {
    auto g = testkit::load_fixture("pkgrepo");
    auto ts = build_triplets(g);
    auto labels = testkit::fixture_labels("pkgrepo");
    EXPECT_EQ(ts.size(), labels.size());
    for (const auto& t : ts) {
        EXPECT_EQ(t.query, make_query(*g.lookup(t.query.anchor_id)));
        auto scope = candidate_scope(g, t.query.anchor_id);
        EXPECT_EQ(t.positives.size() + t.negatives.size(), scope.candidate_ids.size());
        EXPECT_EQ(std::set<std::string>(t.positives.begin(), t.positives.end()), labels[t.query.anchor_id]);
        EXPECT_EQ(triplet_from_json(to_json(t)), t);
    }
    EXPECT_EQ(build_triplets(g, {}, 4), ts);
}

TEST(Query, SignatureThenDocstring) {
    auto g = testkit::load_fixture("minirepo");
    EXPECT_EQ(make_query(*g.lookup("utils.py::shorten::Function")).text,
              "def shorten(text, limit=MAX_LEN):\nCut text to at most limit characters.");
    EXPECT_EQ(make_query(*g.lookup("utils.py::Formatter.camel::Function")).text,
              "def camel(self, name):\nConvert a snake_case name to camelCase.");
}

TEST(Kinds, ParseList) {
    EXPECT_EQ(parse_kinds("Function, class"), (KindSet{UnitKind::Function, UnitKind::Class}));
    EXPECT_THROW(parse_kinds(""), std::invalid_argument);
    EXPECT_THROW(parse_kinds("module"), std::invalid_argument);
}
