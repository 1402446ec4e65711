#include <gtest/gtest.h>

#include <chrono>

#include "hydra/dar.hpp"
#include "hydra/scorer.hpp"
#include "test_support.hpp"

using namespace hydra;

namespace {

std::vector<ScoreRequest> requests(const std::vector<std::string>& ids) {
    std::vector<ScoreRequest> out;
    for (const auto& id : ids) out.push_back({id, "query " + id, "cand " + id, "", ""});
    return out;
}

std::string python_scorer(const testkit::TempDir& dir, const std::string& name, const std::string& body) {
    dir.write(name, "import json, sys\n" + body);
    return std::string(HYDRA_PYTHON) + " " + dir.file(name);
}

}  // namespace

TEST(Scorer, ConstantAndValidation) {
    ConstantScorer s(0.5);
    EXPECT_EQ(s.score_batch(requests({"a", "b"})), (std::vector<double>{0.5, 0.5}));
    EXPECT_TRUE(s.score_batch({}).empty());
    EXPECT_THROW(ConstantScorer(1.5), std::invalid_argument);
    EXPECT_THROW(ConstantScorer(-0.1), std::invalid_argument);
}

TEST(Scorer, RandomIsPerPairAndSeeded) {
    RandomScorer a(7), b(7), c(8);
    auto all = a.score_batch(requests({"x", "y", "z"}));
    auto one = b.score_batch(requests({"y"}));
    EXPECT_EQ(all[1], one[0]);
    EXPECT_NE(all, c.score_batch(requests({"x", "y", "z"})));
    for (double p : all) {
        EXPECT_GE(p, 0.0);
        EXPECT_LT(p, 1.0);
    }
}

TEST(Scorer, CountingForwards) {
    ConstantScorer inner(0.1);
    CountingScorer s(inner);
    s.score_batch(requests({"a", "b", "c"}));
    s.score_batch(requests({"d"}));
    EXPECT_EQ(s.pairs(), 4u);
    EXPECT_EQ(s.batches(), 2u);
    s.reset();
    EXPECT_EQ(s.pairs(), 0u);
}

TEST(Scorer, OracleMatchesLabels) {
    auto g = testkit::load_fixture("minirepo");
    OracleScorer s(g);
    const std::string anchor = "main.py::is_url::Function";
    auto scope = candidate_scope(g, anchor);
    std::vector<ScoreRequest> batch;
    for (const auto& c : scope.candidate_ids) batch.push_back({pair_request_id(anchor, c), "", "", anchor, c});
    auto probs = s.score_batch(batch);
    auto labels = testkit::fixture_labels("minirepo").at(anchor);
    for (std::size_t i = 0; i < batch.size(); ++i)
        EXPECT_EQ(probs[i], labels.count(batch[i].candidate_id) ? 1.0 : 0.0) << batch[i].candidate_id;
}

TEST(Scorer, HeuristicPrefersMentionedNames) {
    auto g = testkit::load_fixture("minirepo");
    HeuristicScorer s(g);
    const auto* anchor = g.lookup("main.py::is_url::Function");
    ASSERT_NE(anchor, nullptr);
    auto q = make_query(*anchor);
    ScoreRequest dep{"1", q.text, "", anchor->id, "utils.py::is_full_string::Function"};
    ScoreRequest other{"2", q.text, "", anchor->id, "utils.py::Formatter.snake::Function"};
    auto f = s.features(dep);
    EXPECT_DOUBLE_EQ(f.name_mentioned, 0.0);
    EXPECT_GT(f.name_overlap, 0.5);
    EXPECT_DOUBLE_EQ(f.same_file, 0.0);
    auto p = s.score_batch({dep, other});
    EXPECT_GT(p[0], p[1]);
    EXPECT_THROW(s.features({"3", q.text, "", anchor->id, "nope::x::Function"}), ScorerError);
}

TEST(Scorer, SubprocessRoundTrip) {
    testkit::TempDir dir;
    // Answers in reverse order to check id matching.
    auto cmd = python_scorer(dir, "s.py",
                             "for line in sys.stdin:\n"
                             "    r = json.loads(line)\n"
                             "    sys.stdout.write(json.dumps({'id': r['id'], 'probability': len(r['candidate_text']) / 100}) + '\\n')\n"
                             "    sys.stdout.flush()\n");
    SubprocessScorer s({cmd, 10000});
    auto probs = s.score_batch(requests({"a", "bb", "ccc"}));
    EXPECT_EQ(probs, (std::vector<double>{0.06, 0.07, 0.08}));
    // The process is reused.
    EXPECT_EQ(s.score_batch(requests({"dddd"})), (std::vector<double>{0.09}));
}

TEST(Scorer, SubprocessOutOfOrderResponses) {
    testkit::TempDir dir;
    auto cmd = python_scorer(dir, "s.py",
                             "reqs = [json.loads(sys.stdin.readline()) for _ in range(2)]\n"
                             "for r in reversed(reqs):\n"
                             "    print(json.dumps({'id': r['id'], 'probability': 0.5 if r['id'] == 'a' else 0.25}))\n"
                             "sys.stdout.flush()\n");
    SubprocessScorer s({cmd, 10000});
    EXPECT_EQ(s.score_batch(requests({"a", "b"})), (std::vector<double>{0.5, 0.25}));
}

TEST(Scorer, SubprocessTimeout) {
    testkit::TempDir dir;
    auto cmd = python_scorer(dir, "s.py", "import time\ntime.sleep(30)\n");
    SubprocessScorer s({cmd, 300});
    auto t0 = std::chrono::steady_clock::now();
    try {
        s.score_batch(requests({"a"}));
        FAIL() << "expected timeout";
    } catch (const ScorerError& e) {
        EXPECT_NE(std::string(e.what()).find("timed out"), std::string::npos) << e.what();
    }
    EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(5));
}

TEST(Scorer, SubprocessProtocolErrors) {
    testkit::TempDir dir;
    struct Case {
        const char* body;
        const char* message;
    };
    const Case cases[] = {
        {"sys.stdin.readline()\nprint('not json', flush=True)\n", "malformed"},
        {"sys.stdin.readline()\nprint(json.dumps({'id': 'a', 'probability': 1.5}), flush=True)\n", "out of [0, 1]"},
        {"sys.stdin.readline()\nprint(json.dumps({'id': 'zzz', 'probability': 0.5}), flush=True)\n", "unknown id"},
        {"sys.stdin.readline()\nprint(json.dumps({'id': 'a'}), flush=True)\n", "lacks"},
        {"sys.stdin.readline()\n", "exited"},
    };
    int i = 0;
    for (const auto& c : cases) {
        SubprocessScorer s({python_scorer(dir, "s" + std::to_string(i++) + ".py", c.body), 10000});
        try {
            s.score_batch(requests({"a"}));
            ADD_FAILURE() << "no error for " << c.message;
        } catch (const ScorerError& e) {
            EXPECT_NE(std::string(e.what()).find(c.message), std::string::npos) << e.what();
        }
    }
}

TEST(Scorer, SubprocessBadCommand) {
    SubprocessScorer s({"exit 3", 10000});
    EXPECT_THROW(s.score_batch(requests({"a"})), ScorerError);
    EXPECT_THROW(SubprocessScorer({"", 100}), std::invalid_argument);
}
