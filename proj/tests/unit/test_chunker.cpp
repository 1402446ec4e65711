#include <gtest/gtest.h>

#include <random>

#include "hydra/chunker.hpp"
#include "hydra/text_tokenizer.hpp"
#include "test_support.hpp"

using namespace hydra;

namespace {

std::string words(std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += "w" + std::to_string(i) + (i % 7 == 6 ? "\n" : " ");
    return s;
}

}  // namespace

TEST(TextTokenizer, SplitsCompoundsAndKeepsThem) {
    EXPECT_EQ(tokenize_code("snake_case_to_camel"),
              (std::vector<std::string>{"snake_case_to_camel", "snake", "case", "to", "camel"}));
    EXPECT_EQ(tokenize_code("isFullString"), (std::vector<std::string>{"isfullstring", "is", "full", "string"}));
    EXPECT_TRUE(tokenize_code("").empty());
    EXPECT_EQ(tokenize_code("x = MAX_LEN"), (std::vector<std::string>{"x", "max_len", "max", "len"}));
    EXPECT_EQ(tokenize_code("__init__ HTTPServer"),
              (std::vector<std::string>{"__init__", "init", "httpserver", "http", "server"}));
    EXPECT_EQ(tokenize_code("a.b(c)"), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_TRUE(tokenize_code("___ += -").empty());
}

TEST(Chunker, StrideIsCeilOfHalf) {
    EXPECT_EQ(chunk_stride({2048, 0.5}), 1024u);
    EXPECT_EQ(chunk_stride({5, 0.5}), 3u);
    EXPECT_EQ(chunk_stride({10, 0.0}), 10u);
    EXPECT_THROW(chunk_stride({1, 0.5}), std::invalid_argument);
    EXPECT_THROW(chunk_stride({8, 1.0}), std::invalid_argument);
}

TEST(Chunker, WindowsOverlapByHalf) {
    std::string text = words(10);
    auto chunks = chunk_file("f.py", text, {4, 0.5});
    ASSERT_EQ(chunks.size(), 5u);  // starts 0,2,4,6,8
    EXPECT_EQ(chunks[0].text, "w0 w1 w2 w3");
    EXPECT_EQ(chunks[4].token_start, 8u);
    EXPECT_EQ(chunks[4].token_end, 10u);
    EXPECT_EQ(chunks[4].text, "w8 w9");
    EXPECT_EQ(chunks[1].id(), "f.py#1");
    EXPECT_TRUE(chunk_file("f.py", "  \n# \n", {4, 0.5}).empty());
}

TEST(Chunker, RandomWindowLaw) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = rng() % 300;
        std::size_t size = 2 + rng() % 40;
        auto chunks = chunk_file("f.py", words(n), {size, 0.5});
        std::size_t s = (size + 1) / 2;
        std::vector<bool> covered(n, false);
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            EXPECT_EQ(chunks[i].token_start, i * s);
            for (std::size_t t = chunks[i].token_start; t < chunks[i].token_end; ++t) covered[t] = true;
        }
        EXPECT_EQ(chunks.size(), n == 0 ? 0 : (n + s - 1) / s);
        EXPECT_TRUE(std::all_of(covered.begin(), covered.end(), [](bool b) { return b; }));
    }
}

TEST(Chunker, IndexJsonRoundTrip) {
    auto index = build_chunk_index(testkit::fixture_dir("minirepo"), {16, 0.5});
    EXPECT_EQ(index.files, (std::vector<std::string>{"main.py", "utils.py"}));
    EXPECT_FALSE(index.chunks.empty());
    EXPECT_EQ(chunk_index_from_json(to_json(index)), index);
}
