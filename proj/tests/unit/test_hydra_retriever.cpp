#include <gtest/gtest.h>

#include "hydra/hydra_retriever.hpp"
#include "hydra/text_tokenizer.hpp"
#include "reference_bm25.hpp"
#include "test_support.hpp"

using namespace hydra;

namespace {

const std::string kIsUrl = "main.py::is_url::Function";
const std::string kIsFull = "utils.py::is_full_string::Function";
const std::string kMaxLen = "utils.py::MAX_LEN::Variable";

}  // namespace

TEST(HydraRetriever, IsUrlWithOracle) {
    auto g = testkit::load_fixture("minirepo");
    auto index = build_unit_index(g);
    OracleScorer oracle(g);
    auto q = make_query(*g.lookup(kIsUrl));
    auto ctx = hydra_retrieve(g, index, q, HydraConfig{}, oracle);
    EXPECT_EQ(std::set<std::string>(ctx.dependency_units.begin(), ctx.dependency_units.end()),
              (std::set<std::string>{kIsFull, kMaxLen}));
    ASSERT_TRUE(ctx.retrieval_latency_ms.has_value());
    EXPECT_GE(*ctx.retrieval_latency_ms, 0.0);

    // Reference: brute-force BM25 top-5 over unit documents without the anchor,
    // minus the dependencies, re-ranked.
    std::vector<std::string> ids;
    std::vector<std::vector<std::string>> docs;
    for (const auto& u : g.units()) {
        ids.push_back(u.id);
        docs.push_back(tokenize_code(document_text(u)));
    }
    auto ref = testkit::reference_topk(ids, docs, tokenize_code(q.text), 1.5, 0.75, ids.size());
    std::vector<std::string> want;
    std::size_t taken = 0;
    for (const auto& h : ref) {
        if (h.id == kIsUrl) continue;
        if (taken++ == 5) break;
        if (h.id != kIsFull && h.id != kMaxLen) want.push_back(h.id);
    }
    ASSERT_EQ(ctx.exemplar_hits.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        EXPECT_EQ(ctx.exemplar_hits[i].doc_id, want[i]);
        EXPECT_EQ(ctx.exemplar_hits[i].rank, static_cast<int>(i + 1));
    }
    EXPECT_TRUE(ctx.rendered_prompt.empty());
}

TEST(HydraRetriever, AnchorAndEnclosingClassNeverRanked) {
    auto g = testkit::load_fixture("minirepo");
    auto index = build_unit_index(g);
    auto q = make_query(*g.lookup("utils.py::Formatter.camel::Function"));
    auto hits = unit_bm25_topk(g, index, q, {}, 100);
    for (const auto& h : hits) {
        EXPECT_NE(h.doc_id, "utils.py::Formatter.camel::Function");
        EXPECT_NE(h.doc_id, "utils.py::Formatter::Class");
    }
    EXPECT_FALSE(hits.empty());
}

TEST(HydraRetriever, PromptOrder) {
    auto g = testkit::load_fixture("minirepo");
    RetrievedContext ctx;
    ctx.anchor_id = kIsUrl;
    ctx.dependency_units = {kIsFull, kMaxLen};
    ctx.exemplar_hits = {{"utils.py::shorten::Function", 1.0, 1}};
    auto p = render_prompt(ctx, g, 100000);
    const std::string task = make_query(*g.lookup(kIsUrl)).text;
    const std::string want = "# Dependencies\n\n"
                             "# file: utils.py\n" + g.lookup(kIsFull)->body_text + "\n"
                             "\n"
                             "# file: utils.py\n" + g.lookup(kMaxLen)->body_text + "\n"
                             "\n"
                             "# Similar code\n\n"
                             "# file: utils.py\n" + g.lookup("utils.py::shorten::Function")->body_text + "\n"
                             "\n" + task;
    EXPECT_EQ(p, want);
}

TEST(HydraRetriever, BudgetTruncation) {
    auto g = testkit::load_fixture("minirepo");
    RetrievedContext ctx;
    ctx.anchor_id = kIsUrl;
    ctx.dependency_units = {kIsFull, kMaxLen};
    ctx.exemplar_hits = {{"utils.py::shorten::Function", 1.0, 1}};
    const std::string task = make_query(*g.lookup(kIsUrl)).text;
    EXPECT_EQ(render_prompt(ctx, g, task.size()), task);
    EXPECT_THROW(render_prompt(ctx, g, task.size() - 1), std::invalid_argument);
    EXPECT_THROW(render_prompt(ctx, g, 0), std::invalid_argument);

    auto full = render_prompt(ctx, g, 100000);
    auto cut = render_prompt(ctx, g, full.size() - 1);
    EXPECT_EQ(cut.find("# Similar code"), std::string::npos);
    EXPECT_NE(cut.find("is_full_string(value)"), std::string::npos);
    EXPECT_NE(cut.find("MAX_LEN = 80"), std::string::npos);
}

TEST(HydraRetriever, EmptyContextIsTask) {
    auto g = testkit::load_fixture("minirepo");
    RetrievedContext ctx;
    ctx.anchor_id = kIsUrl;
    EXPECT_EQ(render_prompt(ctx, g, 10000), make_query(*g.lookup(kIsUrl)).text);
    ctx.dependency_units = {"nope::x::Function"};
    EXPECT_THROW(render_prompt(ctx, g, 10000), std::invalid_argument);
}

TEST(HydraRetriever, DuplicatesAndMethodsUnderRenderedClass) {
    auto g = testkit::load_fixture("minirepo");
    RetrievedContext ctx;
    ctx.anchor_id = kIsUrl;
    ctx.dependency_units = {"utils.py::Formatter::Class", "utils.py::Formatter.camel::Function"};
    ctx.exemplar_hits = {{"utils.py::Formatter::Class", 2.0, 1}};
    auto p = render_prompt(ctx, g, 100000);
    EXPECT_EQ(p.find("# Similar code"), std::string::npos);
    std::size_t n = 0;
    for (std::size_t pos = 0; (pos = p.find("def camel", pos)) != std::string::npos; ++pos) ++n;
    EXPECT_EQ(n, 1u);
}

TEST(HydraRetriever, MethodSourceIsDedented) {
    auto g = testkit::load_fixture("minirepo");
    RetrievedContext ctx;
    ctx.anchor_id = kIsUrl;
    ctx.dependency_units = {"utils.py::Formatter.camel::Function"};
    auto p = render_prompt(ctx, g, 100000);
    EXPECT_NE(p.find("# file: utils.py\ndef camel(self, name):\n"), std::string::npos) << p;
}

TEST(HydraRetriever, JsonRoundTrip) {
    RetrievedContext ctx{"a", {"b", "c"}, {{"d", 1.25, 1}}, "prompt", 3.5};
    auto back = context_from_json(to_json(ctx));
    EXPECT_EQ(back.anchor_id, "a");
    EXPECT_EQ(back.dependency_units, ctx.dependency_units);
    EXPECT_EQ(back.exemplar_hits, ctx.exemplar_hits);
    EXPECT_EQ(back.rendered_prompt, "prompt");
    EXPECT_EQ(back.retrieval_latency_ms, 3.5);
    ctx.retrieval_latency_ms.reset();
    EXPECT_TRUE(to_json(ctx)["retrieval_latency_ms"].is_null());
    EXPECT_FALSE(context_from_json(to_json(ctx)).retrieval_latency_ms.has_value());
}
