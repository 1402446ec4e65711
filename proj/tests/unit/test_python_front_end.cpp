#include <gtest/gtest.h>

#include "hydra/python/parser.hpp"
#include "hydra/python/string_literal.hpp"
#include "hydra/python/tokenizer.hpp"

using namespace hydra::python;

namespace {

int count_kind(const Node& n, Kind k) {
    int c = n.kind == k;
    for (const auto& ch : n.children) c += count_kind(ch, k);
    return c;
}

}  // namespace

TEST(Tokenizer, IndentAndDedentAreSynthesized) {
    auto toks = tokenize("if x:\n    y = 1\nz\n");
    int indents = 0, dedents = 0;
    for (const auto& t : toks) {
        indents += t.type == TokenType::Indent;
        dedents += t.type == TokenType::Dedent;
    }
    EXPECT_EQ(indents, 1);
    EXPECT_EQ(dedents, 1);
    EXPECT_EQ(toks.back().type, TokenType::EndMarker);
}

TEST(Tokenizer, BracketsJoinLines) {
    auto toks = tokenize("f(a,\n  b)\n");
    EXPECT_EQ(std::count_if(toks.begin(), toks.end(), [](const Token& t) { return t.type == TokenType::Newline; }), 1);
}

TEST(Tokenizer, FStringFieldsAreRecorded) {
    auto toks = tokenize("f'{a} and {b!r:>{w}}'\n");
    ASSERT_TRUE(toks[0].fstring);
    EXPECT_EQ(toks[0].fields.size(), 3u);
}

TEST(Tokenizer, RawFStringBackslashBeforeBrace) {
    EXPECT_NO_THROW(tokenize("rf'\\{{x}}'\n"));
}

TEST(Tokenizer, UnterminatedStringIsLexicalError) {
    EXPECT_THROW(tokenize("x = 'abc\n"), SyntaxError);
}

TEST(Tokenizer, InconsistentDedentIsRejected) {
    EXPECT_THROW(tokenize("if x:\n        a\n    b\n"), SyntaxError);
}

TEST(Parser, FunctionHeaderSpansDefThroughColon) {
    std::string src = "@dec\nasync def f(a, *, b: int = 2) -> str:\n    return a\n";
    Node m = parse_module_strict(src);
    const Node& f = m.child(0);
    ASSERT_EQ(f.kind, Kind::FunctionDef);
    EXPECT_TRUE(f.flag);
    std::string header = src.substr(f.header_begin.offset, f.header_end.offset - f.header_begin.offset);
    EXPECT_EQ(header, "async def f(a, *, b: int = 2) -> str:");
    EXPECT_EQ(f.begin.line, 1);  // decorators included
}

TEST(Parser, ContextsOfAssignmentTargets) {
    Node m = parse_module_strict("a, (b, *c) = x.y[0] = v\n");
    const Node& assign = m.child(0);
    ASSERT_EQ(assign.kind, Kind::Assign);
    EXPECT_EQ(assign.child(0).ctx, Ctx::Store);
    EXPECT_EQ(assign.child(1).ctx, Ctx::Store);
    EXPECT_EQ(assign.child(1).child(0).ctx, Ctx::Load);  // x.y inside the subscript
}

TEST(Parser, RejectsAssignmentToCall) { EXPECT_THROW(parse_module_strict("f() = 1\n"), SyntaxError); }

TEST(Parser, MatchIsASoftKeyword) {
    Node a = parse_module_strict("match = 1\nmatch(x)\n");
    EXPECT_EQ(count_kind(a, Kind::Match), 0);
    Node b = parse_module_strict("match p:\n    case [1, *rest] if rest:\n        pass\n    case _:\n        pass\n");
    EXPECT_EQ(count_kind(b, Kind::MatchCase), 2);
}

TEST(Parser, ParenthesizedWithItems) {
    Node m = parse_module_strict("with (open(a) as f, open(b) as g):\n    pass\n");
    EXPECT_EQ(count_kind(m, Kind::WithItem), 2);
}

TEST(Parser, FStringFieldsBecomeExpressions) {
    Node m = parse_module_strict("x = f'{name!r} {value=}'\n");
    EXPECT_EQ(count_kind(m, Kind::JoinedStr), 1);
    EXPECT_EQ(count_kind(m, Kind::Name), 3);  // x, name, value
}

TEST(Parser, UnclosedBracketIsFatal) {
    auto r = parse_module("def good():\n    return 1\n\ndef bad(:\n    pass\n");
    EXPECT_TRUE(r.fatal);
    EXPECT_FALSE(r.errors.empty());
}

TEST(Parser, RecoversAtNextTopLevelStatement) {
    auto r = parse_module("def good():\n    return 1\n\ndef bad():\n    x = = 1\n\nclass After:\n    pass\n");
    EXPECT_FALSE(r.fatal);
    ASSERT_EQ(r.errors.size(), 1u);
    EXPECT_EQ(r.errors[0].line, 5);
    EXPECT_EQ(count_kind(r.module, Kind::FunctionDef), 1);
    EXPECT_EQ(count_kind(r.module, Kind::ClassDef), 1);
}

TEST(Parser, LexicalErrorIsFatal) {
    auto r = parse_module("x = '''never closed\n");
    EXPECT_TRUE(r.fatal);
    EXPECT_TRUE(r.module.children.empty());
}

TEST(Parser, FirstLineIndentForMethodText) {
    TokenizeOptions opts;
    opts.first_line_indent = 4;
    Node m = parse_module_strict("def m(self):\n        return self.x\n", opts);
    EXPECT_EQ(m.child(0).kind, Kind::FunctionDef);
}

TEST(Dedent, RemovesCommonPrefix) {
    EXPECT_EQ(dedent("    a\n      b\n\n    c\n"), "a\n  b\n\nc\n");
}

TEST(StringLiteral, Escapes) {
    EXPECT_EQ(evaluate_string_literal("'a\\tb'"), "a\tb");
    EXPECT_EQ(evaluate_string_literal("r'a\\tb'"), "a\\tb");
    EXPECT_EQ(evaluate_string_literal("'\\x41\\u00e9'"), "A\xc3\xa9");
    EXPECT_EQ(evaluate_string_literal("'''x\\\ny'''"), "xy");
    EXPECT_FALSE(evaluate_string_literal("b'x'").has_value());
    EXPECT_FALSE(evaluate_string_literal("f'x'").has_value());
}

TEST(StringLiteral, CleandocMatchesInspect) {
    // inspect.cleandoc("Summary.\n\n    Body line.\n      indented\n    ")
    EXPECT_EQ(cleandoc("Summary.\n\n    Body line.\n      indented\n    "), "Summary.\n\nBody line.\n  indented");
    EXPECT_EQ(cleandoc("\n\n   only\n"), "only");
}

TEST(StringLiteral, DocstringOfBody) {
    Node m = parse_module_strict("def f():\n    \"\"\"Doc.\n\n    More.\n    \"\"\"\n    return 1\n");
    auto doc = docstring_of(m.child(0).child(4));
    ASSERT_TRUE(doc.has_value());
    EXPECT_EQ(*doc, "Doc.\n\nMore.");
    Node n = parse_module_strict("def g():\n    return 'x'\n");
    EXPECT_FALSE(docstring_of(n.child(0).child(4)).has_value());
}
