#include <gtest/gtest.h>

#include <cmath>

#include "hydra/eval.hpp"
#include "test_support.hpp"

using namespace hydra;

TEST(Eval, RetrievalSets) {
    CodeGraph empty;
    auto e = retrieval_eval({"a", "b", "x"}, {"a", "b", "c"}, empty);
    EXPECT_DOUBLE_EQ(e.precision, 2.0 / 3);
    EXPECT_DOUBLE_EQ(e.recall, 2.0 / 3);
    EXPECT_DOUBLE_EQ(e.f1, 2.0 / 3);
    auto same = retrieval_eval({"a"}, {"a"}, empty);
    EXPECT_DOUBLE_EQ(same.f1, 1.0);
    auto none = retrieval_eval({}, {"a"}, empty);
    EXPECT_EQ(none.precision, 0.0);
    EXPECT_EQ(none.recall, 0.0);
    EXPECT_EQ(none.f1, 0.0);
    EXPECT_THROW(retrieval_eval({"a"}, {}, empty), std::invalid_argument);
}

TEST(Eval, KindRecalls) {
    auto g = testkit::load_fixture("minirepo");
    auto e = retrieval_eval({"utils.py::is_full_string::Function"},
                            {"utils.py::is_full_string::Function", "utils.py::MAX_LEN::Variable"}, g);
    EXPECT_EQ(e.frecall, 1.0);
    EXPECT_EQ(e.vrecall, 0.0);
    EXPECT_FALSE(e.crecall.has_value());
    auto j = to_json(e);
    EXPECT_TRUE(j["crecall"].is_null());
}

TEST(Eval, PassAtK) {
    for (int k = 1; k <= 5; ++k) {
        EXPECT_EQ(pass_at_k(5, 0, k), 0.0);
        EXPECT_EQ(pass_at_k(5, 5, k), 1.0);
    }
    EXPECT_NEAR(pass_at_k(5, 2, 1), 0.4, 1e-15);
    // 1 - C(3,2)/C(5,2) = 1 - 3/10
    EXPECT_NEAR(pass_at_k(5, 2, 2), 0.7, 1e-15);
    EXPECT_THROW(pass_at_k(5, 2, 6), std::invalid_argument);
    EXPECT_THROW(pass_at_k(5, 6, 1), std::invalid_argument);
    EXPECT_THROW(pass_at_k(5, 2, 0), std::invalid_argument);
}

TEST(Eval, PassAtKMatchesBinomialRatio) {
    auto choose = [](int n, int r) {
        if (r < 0 || r > n) return 0.0;
        double v = 1;
        for (int i = 1; i <= r; ++i) v = v * (n - r + i) / i;
        return v;
    };
    for (int n = 1; n <= 12; ++n)
        for (int c = 0; c <= n; ++c)
            for (int k = 1; k <= n; ++k)
                EXPECT_NEAR(pass_at_k(n, c, k), 1.0 - choose(n - c, k) / choose(n, k), 1e-12);
}

TEST(Eval, Dir) {
    EXPECT_NEAR(dependency_invocation_rate({"a", "b"}, {"a", "b", "c"}), 2.0 / 3, 1e-15);
    EXPECT_EQ(dependency_invocation_rate({}, {"a"}), 0.0);
    EXPECT_EQ(dependency_invocation_rate({"a", "b", "z"}, {"a", "b"}), 1.0);
    EXPECT_THROW(dependency_invocation_rate({"a"}, {}), std::invalid_argument);
}

TEST(Eval, SolutionDir) {
    auto g = testkit::load_fixture("minirepo");
    DependencyOracle oracle(g);
    auto scope = candidate_scope(g, "main.py::is_url::Function");
    std::set<std::string> gold = {"utils.py::is_full_string::Function", "utils.py::MAX_LEN::Variable"};
    auto half = solution_dir(oracle, scope, "def is_url(value):\n    return is_full_string(value)\n", gold);
    EXPECT_TRUE(half.parsed);
    EXPECT_DOUBLE_EQ(half.rate, 0.5);
    EXPECT_EQ(half.invoked, (std::vector<std::string>{"utils.py::is_full_string::Function"}));
    auto broken = solution_dir(oracle, scope, "def is_url(value:\n    return (\n", gold);
    EXPECT_FALSE(broken.parsed);
    EXPECT_EQ(broken.rate, 0.0);
}

TEST(Eval, Latency) {
    auto one = latency_summary({10});
    EXPECT_EQ(one.min, 10);
    EXPECT_EQ(one.max, 10);
    EXPECT_EQ(one.mean, 10);
    EXPECT_EQ(one.median, 10);
    auto s = latency_summary({1, 2, 3, 100});
    EXPECT_EQ(s.min, 1);
    EXPECT_EQ(s.max, 100);
    EXPECT_DOUBLE_EQ(s.mean, 26.5);
    EXPECT_DOUBLE_EQ(s.median, 2.5);
    auto p = latency_summary({100, 3, 1, 2});
    EXPECT_EQ(p.median, s.median);
    EXPECT_EQ(p.mean, s.mean);
    EXPECT_THROW(latency_summary({}), std::invalid_argument);
}

TEST(Eval, DirAggregateParse) {
    EXPECT_EQ(parse_dir_aggregate("mean"), DirAggregate::Mean);
    EXPECT_EQ(parse_dir_aggregate("best"), DirAggregate::Best);
    EXPECT_THROW(parse_dir_aggregate("max"), std::invalid_argument);
}

TEST(Eval, Report) {
    auto g = testkit::load_fixture("minirepo");
    EvalInputs in;
    const std::string a = "main.py::is_url::Function";
    const std::string b = "utils.py::shorten::Function";
    in.task_ids = {a, b};
    in.gold[a] = {"utils.py::is_full_string::Function", "utils.py::MAX_LEN::Variable"};
    in.gold[b] = {"utils.py::is_full_string::Function", "utils.py::MAX_LEN::Variable"};
    in.retrieved[a] = {"utils.py::is_full_string::Function", "utils.py::MAX_LEN::Variable"};
    in.retrieved[b] = {"utils.py::is_full_string::Function", "utils.py::Formatter::Class"};
    in.latency_ms[a] = 2.0;
    in.latency_ms[b] = 4.0;
    in.solutions = {
        {a, 0, "def is_url(value):\n    return is_full_string(value) and len(value) < MAX_LEN\n", true},
        {a, 1, "def is_url(value):\n    return False\n", false},
        {b, 0, "def shorten(text, limit=MAX_LEN):\n    return text[:limit]\n", false},
        {b, 1, "def shorten(text:\n", false},
    };
    in.ks = {1, 2};
    auto r = evaluate_report(g, in);
    const auto& s = r.at("summary");
    EXPECT_EQ(s.at("tasks").get<int>(), 2);
    EXPECT_DOUBLE_EQ(s.at("retrieval").at("precision").get<double>(), 0.75);
    EXPECT_DOUBLE_EQ(s.at("retrieval").at("recall").get<double>(), 0.75);
    EXPECT_DOUBLE_EQ(s.at("pass_at_k").at("1").get<double>(), 0.25);
    EXPECT_DOUBLE_EQ(s.at("pass_at_k").at("2").get<double>(), 0.5);
    // Per-sample DIR: is_url {1, 0}, shorten {0.5 (default value only), 0 (unparsed)}.
    EXPECT_DOUBLE_EQ(s.at("dir").get<double>(), 0.375);
    EXPECT_EQ(s.at("unparsed_samples").get<int>(), 1);
    EXPECT_DOUBLE_EQ(s.at("latency_ms").at("mean").get<double>(), 3.0);
    ASSERT_EQ(r.at("tasks").size(), 2u);
    EXPECT_EQ(r.at("tasks")[0].at("anchor_id"), a);

    in.dir_aggregate = DirAggregate::Best;
    EXPECT_DOUBLE_EQ(evaluate_report(g, in).at("summary").at("dir").get<double>(), 0.75);

    in.ks = {3};
    EXPECT_THROW(evaluate_report(g, in), std::invalid_argument);
}
