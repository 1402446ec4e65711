#include "hydra/python/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>

namespace hydra::python {

std::string_view kind_name(Kind kind) {
    static constexpr std::array<std::string_view, static_cast<std::size_t>(Kind::Empty) + 1> kNames = {
        "Module", "FunctionDef", "ClassDef", "Param", "Lambda", "Return", "Expr", "Await", "Starred", "Yield",
        "YieldFrom", "Decorator", "Delete", "Assign", "AugAssign", "AnnAssign", "For", "While", "If", "With",
        "WithItem", "Try", "ExceptHandler", "Raise", "Assert", "Import", "ImportFrom", "Alias", "Global",
        "Nonlocal", "Identifier", "Pass", "Break", "Continue", "Match", "MatchCase", "TypeAlias", "TypeParam",
        "BoolOp", "BinOp", "UnaryOp", "Compare", "NamedExpr", "IfExp", "Dict", "DictItem", "Set", "List", "Tuple",
        "ListComp", "SetComp", "GeneratorExp", "DictComp", "Comprehension", "Call", "Keyword", "Attribute",
        "Subscript", "Slice", "Name", "Constant", "JoinedStr", "MatchValue", "MatchSingleton", "MatchSequence",
        "MatchMapping", "MatchClass", "MatchStar", "MatchAs", "MatchOr", "Group", "Empty"};
    return kNames[static_cast<std::size_t>(kind)];
}

namespace {

constexpr std::array<std::string_view, 13> kAugOps = {"+=", "-=", "*=", "/=", "//=", "%=", "@=",
                                                      "&=", "|=", "^=", ">>=", "<<=", "**="};

class Parser {
public:
    Parser(std::string_view src, const TokenizeOptions& opt, bool expression_mode = false)
        : src_(src), opt_(opt), toks_(tokenize(src, opt)) {
        if (expression_mode) {
            std::erase_if(toks_, [](const Token& t) {
                return t.type == TokenType::Newline || t.type == TokenType::Indent || t.type == TokenType::Dedent;
            });
        }
    }

    ParseResult parse_file_recovering() {
        ParseResult result;
        result.module.kind = Kind::Module;
        result.module.begin = tok().begin;
        while (tok().type != TokenType::EndMarker) {
            std::size_t start = pos_;
            try {
                parse_statement(result.module.children);
            } catch (const SyntaxError& e) {
                result.errors.push_back({e.line(), e.message()});
                pos_ = start;
                skip_to_next_top_level();
            }
        }
        result.module.end = tok().end;
        return result;
    }

    Node parse_file_strict() {
        Node module;
        module.kind = Kind::Module;
        module.begin = tok().begin;
        while (tok().type != TokenType::EndMarker) parse_statement(module.children);
        module.end = tok().end;
        return module;
    }

    Node parse_single_expression() {
        Node e = star_expressions();
        if (tok().type != TokenType::EndMarker) error("unexpected token after expression");
        return e;
    }

private:
    // ---- token helpers -------------------------------------------------

    const Token& tok() const { return toks_[pos_]; }
    const Token& ahead(std::size_t k) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }

    bool at_op(std::string_view op) const { return tok().is_op(op); }
    bool at_kw(std::string_view kw) const { return tok().is_name(kw); }

    const Token& advance() {
        const Token& t = toks_[pos_];
        if (t.type != TokenType::Newline && t.type != TokenType::Indent && t.type != TokenType::Dedent &&
            t.type != TokenType::EndMarker) {
            last_end_ = t.end;
        }
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }

    [[noreturn]] void error(const std::string& msg) const {
        const Token& t = tok();
        std::string where;
        switch (t.type) {
            case TokenType::Newline: where = "end of line"; break;
            case TokenType::Indent: where = "indent"; break;
            case TokenType::Dedent: where = "dedent"; break;
            case TokenType::EndMarker: where = "end of input"; break;
            default: where = "'" + std::string(t.text) + "'";
        }
        throw SyntaxError(t.begin.line, msg + " at " + where);
    }

    const Token& expect_op(std::string_view op) {
        if (!at_op(op)) error("expected '" + std::string(op) + "'");
        return advance();
    }

    const Token& expect_kw(std::string_view kw) {
        if (!at_kw(kw)) error("expected '" + std::string(kw) + "'");
        return advance();
    }

    std::string expect_name() {
        if (tok().type != TokenType::Name || is_keyword(tok().text)) error("expected identifier");
        return std::string(advance().text);
    }

    void expect_newline() {
        if (tok().type == TokenType::Newline) {
            advance();
            return;
        }
        if (tok().type == TokenType::EndMarker) return;
        error("invalid syntax");
    }

    Node start(Kind kind) const {
        Node n;
        n.kind = kind;
        n.begin = tok().begin;
        return n;
    }

    Node start_at(Kind kind, const Position& begin) const {
        Node n;
        n.kind = kind;
        n.begin = begin;
        return n;
    }

    Node finish(Node n) const {
        n.end = last_end_;
        return n;
    }

    static Node empty() { return Node{}; }

    static Node group(std::vector<Node> items) {
        Node g;
        g.kind = Kind::Group;
        g.children = std::move(items);
        if (!g.children.empty()) {
            g.begin = g.children.front().begin;
            g.end = g.children.back().end;
        }
        return g;
    }

    void skip_to_next_top_level() {
        int depth = 0;
        bool moved = false;
        while (tok().type != TokenType::EndMarker) {
            TokenType type = tok().type;
            std::size_t before = pos_;
            advance();
            if (pos_ == before) break;
            moved = true;
            if (type == TokenType::Indent) {
                ++depth;
            } else if (type == TokenType::Dedent) {
                depth = std::max(depth - 1, 0);
                if (depth == 0 && tok().type != TokenType::Dedent && tok().type != TokenType::Indent) break;
            } else if (type == TokenType::Newline && depth == 0 && tok().type != TokenType::Indent) {
                break;
            }
        }
        if (!moved && tok().type != TokenType::EndMarker) advance();
    }

    bool starts_expression() const {
        const Token& t = tok();
        switch (t.type) {
            case TokenType::Name:
                if (!is_keyword(t.text)) return true;
                return t.text == "None" || t.text == "True" || t.text == "False" || t.text == "lambda" ||
                       t.text == "not" || t.text == "await";
            case TokenType::Number:
            case TokenType::String: return true;
            case TokenType::Op:
                return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" || t.text == "+" ||
                       t.text == "~" || t.text == "*" || t.text == "...";
            default: return false;
        }
    }

    // ---- statements ----------------------------------------------------

    void parse_statement(std::vector<Node>& out) {
        const Token& t = tok();
        if (t.type == TokenType::Indent) error("unexpected indent");
        if (t.type == TokenType::Dedent) error("unexpected dedent");
        if (t.type == TokenType::Op && t.text == "@") {
            out.push_back(decorated());
            return;
        }
        if (t.type == TokenType::Name) {
            if (t.text == "def") { out.push_back(funcdef({}, t.begin, false)); return; }
            if (t.text == "class") { out.push_back(classdef({}, t.begin)); return; }
            if (t.text == "if") { out.push_back(if_stmt()); return; }
            if (t.text == "while") { out.push_back(while_stmt()); return; }
            if (t.text == "for") { out.push_back(for_stmt(t.begin, false)); return; }
            if (t.text == "try") { out.push_back(try_stmt()); return; }
            if (t.text == "with") { out.push_back(with_stmt(t.begin, false)); return; }
            if (t.text == "async") {
                Position begin = t.begin;
                const Token& next = ahead(1);
                if (next.is_name("def")) { advance(); out.push_back(funcdef({}, begin, true)); return; }
                if (next.is_name("for")) { advance(); out.push_back(for_stmt(begin, true)); return; }
                if (next.is_name("with")) { advance(); out.push_back(with_stmt(begin, true)); return; }
                error("invalid syntax");
            }
            if (t.text == "match") {
                if (auto m = try_match_stmt()) {
                    out.push_back(std::move(*m));
                    return;
                }
            }
        }
        simple_stmts(out);
    }

    void simple_stmts(std::vector<Node>& out) {
        std::vector<Node> local;
        local.push_back(simple_stmt());
        while (at_op(";")) {
            advance();
            if (tok().type == TokenType::Newline || tok().type == TokenType::EndMarker) break;
            local.push_back(simple_stmt());
        }
        expect_newline();
        for (auto& n : local) out.push_back(std::move(n));
    }

    Node block() {
        expect_op(":");
        std::vector<Node> body;
        if (tok().type == TokenType::Newline) {
            advance();
            if (tok().type != TokenType::Indent) error("expected an indented block");
            advance();
            while (tok().type != TokenType::Dedent && tok().type != TokenType::EndMarker) parse_statement(body);
            if (tok().type == TokenType::Dedent) advance();
        } else {
            simple_stmts(body);
        }
        return group(std::move(body));
    }

    Node decorated() {
        Position begin = tok().begin;
        std::vector<Node> decorators;
        while (at_op("@")) {
            Node d = start(Kind::Decorator);
            advance();
            d.children.push_back(named_expression());
            decorators.push_back(finish(std::move(d)));
            expect_newline();
        }
        if (at_kw("def")) return funcdef(std::move(decorators), begin, false);
        if (at_kw("class")) return classdef(std::move(decorators), begin);
        if (at_kw("async") && ahead(1).is_name("def")) {
            advance();
            return funcdef(std::move(decorators), begin, true);
        }
        error("expected function or class after decorator");
    }

    Node type_params() {
        std::vector<Node> params;
        if (!at_op("[")) return group({});
        advance();
        while (!at_op("]")) {
            Node p = start(Kind::TypeParam);
            if (at_op("*") || at_op("**")) p.op = std::string(advance().text);
            p.value = expect_name();
            if (at_op(":")) {
                advance();
                p.children.push_back(expression());
            } else {
                p.children.push_back(empty());
            }
            if (at_op("=")) {
                advance();
                p.children.push_back(expression());
            }
            params.push_back(finish(std::move(p)));
            if (!at_op(",")) break;
            advance();
        }
        expect_op("]");
        return group(std::move(params));
    }

    Node funcdef(std::vector<Node> decorators, Position begin, bool is_async) {
        Node fn = start_at(Kind::FunctionDef, begin);
        fn.flag = is_async;
        fn.header_begin = is_async ? toks_[pos_ - 1].begin : tok().begin;
        expect_kw("def");
        fn.value = expect_name();
        fn.children.push_back(group(std::move(decorators)));
        fn.children.push_back(type_params());
        expect_op("(");
        fn.children.push_back(parameters(")", true));
        expect_op(")");
        if (at_op("->")) {
            advance();
            fn.children.push_back(expression());
        } else {
            fn.children.push_back(empty());
        }
        fn.header_end = tok().end;
        fn.children.push_back(block());
        return finish(std::move(fn));
    }

    Node parameters(std::string_view closer, bool annotations) {
        std::vector<Node> params;
        while (!at_op(closer)) {
            Node p = start(Kind::Param);
            if (at_op("/")) {
                advance();
                p.op = "/";
                p.children = {empty(), empty()};
                params.push_back(finish(std::move(p)));
            } else {
                if (at_op("*") || at_op("**")) p.op = std::string(advance().text);
                if (p.op == "*" && (at_op(",") || at_op(closer))) {
                    p.children = {empty(), empty()};
                    params.push_back(finish(std::move(p)));
                } else {
                    p.value = expect_name();
                    Node annotation = empty();
                    if (annotations && at_op(":")) {
                        advance();
                        annotation = at_op("*") ? star_expression() : expression();
                    }
                    Node def = empty();
                    if (at_op("=")) {
                        advance();
                        def = expression();
                    }
                    p.children.push_back(std::move(annotation));
                    p.children.push_back(std::move(def));
                    params.push_back(finish(std::move(p)));
                }
            }
            if (!at_op(",")) break;
            advance();
        }
        return group(std::move(params));
    }

    Node classdef(std::vector<Node> decorators, Position begin) {
        Node cls = start_at(Kind::ClassDef, begin);
        cls.header_begin = tok().begin;
        expect_kw("class");
        cls.value = expect_name();
        cls.children.push_back(group(std::move(decorators)));
        cls.children.push_back(type_params());
        std::vector<Node> bases;
        if (at_op("(")) {
            advance();
            bases = call_arguments();
            expect_op(")");
        }
        cls.children.push_back(group(std::move(bases)));
        cls.header_end = tok().end;
        cls.children.push_back(block());
        return finish(std::move(cls));
    }

    Node if_stmt() {
        Node n = start(Kind::If);
        advance();  // if / elif
        n.children.push_back(named_expression());
        n.children.push_back(block());
        if (at_kw("elif")) {
            n.children.push_back(group({if_stmt()}));
        } else if (at_kw("else")) {
            advance();
            n.children.push_back(block());
        } else {
            n.children.push_back(group({}));
        }
        return finish(std::move(n));
    }

    Node while_stmt() {
        Node n = start(Kind::While);
        advance();
        n.children.push_back(named_expression());
        n.children.push_back(block());
        if (at_kw("else")) {
            advance();
            n.children.push_back(block());
        } else {
            n.children.push_back(group({}));
        }
        return finish(std::move(n));
    }

    Node for_stmt(Position begin, bool is_async) {
        Node n = start_at(Kind::For, begin);
        n.flag = is_async;
        expect_kw("for");
        Node target = target_list();
        set_ctx(target, Ctx::Store);
        n.children.push_back(std::move(target));
        expect_kw("in");
        n.children.push_back(star_expressions());
        n.children.push_back(block());
        if (at_kw("else")) {
            advance();
            n.children.push_back(block());
        } else {
            n.children.push_back(group({}));
        }
        return finish(std::move(n));
    }

    Node try_stmt() {
        Node n = start(Kind::Try);
        advance();
        n.children.push_back(block());
        std::vector<Node> handlers;
        while (at_kw("except")) {
            Node h = start(Kind::ExceptHandler);
            advance();
            if (at_op("*")) advance();
            if (at_op(":")) {
                h.children.push_back(empty());
            } else {
                h.children.push_back(star_expressions());
                if (at_kw("as")) {
                    advance();
                    h.value = expect_name();
                }
            }
            h.children.push_back(block());
            handlers.push_back(finish(std::move(h)));
        }
        n.children.push_back(group(std::move(handlers)));
        if (at_kw("else")) {
            advance();
            n.children.push_back(block());
        } else {
            n.children.push_back(group({}));
        }
        if (at_kw("finally")) {
            advance();
            n.children.push_back(block());
        } else {
            n.children.push_back(group({}));
        }
        if (n.children[1].children.empty() && n.children[3].children.empty())
            error("expected 'except' or 'finally' block");
        return finish(std::move(n));
    }

    Node with_item() {
        Node item = start(Kind::WithItem);
        item.children.push_back(expression());
        if (at_kw("as")) {
            advance();
            Node target = single_target();
            set_ctx(target, Ctx::Store);
            item.children.push_back(std::move(target));
        } else {
            item.children.push_back(empty());
        }
        return finish(std::move(item));
    }

    Node with_stmt(Position begin, bool is_async) {
        Node n = start_at(Kind::With, begin);
        n.flag = is_async;
        expect_kw("with");
        std::vector<Node> items;
        bool parsed = false;
        if (at_op("(")) {
            std::size_t save = pos_;
            Position save_end = last_end_;
            try {
                advance();
                std::vector<Node> tmp;
                while (!at_op(")")) {
                    tmp.push_back(with_item());
                    if (!at_op(",")) break;
                    advance();
                }
                expect_op(")");
                if (!at_op(":")) error("expected ':'");
                items = std::move(tmp);
                parsed = true;
            } catch (const SyntaxError&) {
                pos_ = save;
                last_end_ = save_end;
            }
        }
        if (!parsed) {
            items.push_back(with_item());
            while (at_op(",")) {
                advance();
                items.push_back(with_item());
            }
        }
        n.children.push_back(group(std::move(items)));
        n.children.push_back(block());
        return finish(std::move(n));
    }

    std::optional<Node> try_match_stmt() {
        std::size_t save = pos_;
        Position save_end = last_end_;
        Node n = start(Kind::Match);
        try {
            advance();  // match
            Node subject = star_named_expressions_tuple();
            expect_op(":");
            if (tok().type != TokenType::Newline) error("expected newline");
            advance();
            if (tok().type != TokenType::Indent) error("expected indent");
            advance();
            if (!at_kw("case")) error("expected 'case'");
            n.children.push_back(std::move(subject));
        } catch (const SyntaxError&) {
            pos_ = save;
            last_end_ = save_end;
            return std::nullopt;
        }
        while (at_kw("case")) {
            Node c = start(Kind::MatchCase);
            advance();
            c.children.push_back(patterns());
            if (at_kw("if")) {
                advance();
                c.children.push_back(named_expression());
            } else {
                c.children.push_back(empty());
            }
            c.children.push_back(block());
            n.children.push_back(finish(std::move(c)));
        }
        if (tok().type != TokenType::Dedent) error("expected 'case' block");
        advance();
        return finish(std::move(n));
    }

    Node simple_stmt() {
        const Token& t = tok();
        if (t.type == TokenType::Name) {
            std::string_view w = t.text;
            if (w == "pass" || w == "break" || w == "continue") {
                Node n = start(w == "pass" ? Kind::Pass : (w == "break" ? Kind::Break : Kind::Continue));
                advance();
                return finish(std::move(n));
            }
            if (w == "return") {
                Node n = start(Kind::Return);
                advance();
                if (starts_expression()) n.children.push_back(star_expressions());
                return finish(std::move(n));
            }
            if (w == "raise") {
                Node n = start(Kind::Raise);
                advance();
                if (starts_expression()) {
                    n.children.push_back(expression());
                    if (at_kw("from")) {
                        advance();
                        n.children.push_back(expression());
                    } else {
                        n.children.push_back(empty());
                    }
                } else {
                    n.children = {empty(), empty()};
                }
                return finish(std::move(n));
            }
            if (w == "global" || w == "nonlocal") {
                Node n = start(w == "global" ? Kind::Global : Kind::Nonlocal);
                advance();
                do {
                    Node id = start(Kind::Identifier);
                    id.value = expect_name();
                    n.children.push_back(finish(std::move(id)));
                } while (at_op(",") && (advance(), true));
                return finish(std::move(n));
            }
            if (w == "del") {
                Node n = start(Kind::Delete);
                advance();
                Node targets = target_list();
                set_ctx(targets, Ctx::Del);
                if (targets.kind == Kind::Tuple && targets.begin.offset == n.children.size()) {
                    n.children.push_back(std::move(targets));
                } else {
                    n.children.push_back(std::move(targets));
                }
                return finish(std::move(n));
            }
            if (w == "assert") {
                Node n = start(Kind::Assert);
                advance();
                n.children.push_back(expression());
                if (at_op(",")) {
                    advance();
                    n.children.push_back(expression());
                } else {
                    n.children.push_back(empty());
                }
                return finish(std::move(n));
            }
            if (w == "import") return import_stmt();
            if (w == "from") return import_from();
            if (w == "type" && ahead(1).type == TokenType::Name &&
                (ahead(2).is_op("=") || ahead(2).is_op("["))) {
                if (auto alias = try_type_alias()) return std::move(*alias);
            }
        }
        return expression_statement();
    }

    std::optional<Node> try_type_alias() {
        std::size_t save = pos_;
        Position save_end = last_end_;
        try {
            Node n = start(Kind::TypeAlias);
            advance();
            Node name = start(Kind::Name);
            name.value = expect_name();
            name.ctx = Ctx::Store;
            n.children.push_back(finish(std::move(name)));
            n.children.push_back(type_params());
            expect_op("=");
            n.children.push_back(expression());
            return finish(std::move(n));
        } catch (const SyntaxError&) {
            pos_ = save;
            last_end_ = save_end;
            return std::nullopt;
        }
    }

    std::string dotted_name() {
        std::string name = expect_name();
        while (at_op(".")) {
            advance();
            name += ".";
            name += expect_name();
        }
        return name;
    }

    Node import_stmt() {
        Node n = start(Kind::Import);
        advance();
        do {
            Node a = start(Kind::Alias);
            a.value = dotted_name();
            if (at_kw("as")) {
                advance();
                a.aux = expect_name();
            }
            n.children.push_back(finish(std::move(a)));
        } while (at_op(",") && (advance(), true));
        return finish(std::move(n));
    }

    Node import_from() {
        Node n = start(Kind::ImportFrom);
        advance();
        while (at_op(".") || at_op("...")) n.level += static_cast<int>(advance().text.size());
        if (!at_kw("import")) n.value = dotted_name();
        if (n.level == 0 && n.value.empty()) error("expected module name");
        expect_kw("import");
        if (at_op("*")) {
            Node a = start(Kind::Alias);
            advance();
            a.value = "*";
            n.children.push_back(finish(std::move(a)));
            return finish(std::move(n));
        }
        bool paren = at_op("(");
        if (paren) advance();
        while (true) {
            Node a = start(Kind::Alias);
            a.value = expect_name();
            if (at_kw("as")) {
                advance();
                a.aux = expect_name();
            }
            n.children.push_back(finish(std::move(a)));
            if (!at_op(",")) break;
            advance();
            if (paren && at_op(")")) break;
        }
        if (paren) expect_op(")");
        return finish(std::move(n));
    }

    Node rhs() { return at_kw("yield") ? yield_expr() : star_expressions(); }

    Node expression_statement() {
        Position begin = tok().begin;
        Node first = rhs();
        if (at_op(":")) {
            Node n = start_at(Kind::AnnAssign, begin);
            advance();
            set_ctx(first, Ctx::Store);
            n.children.push_back(std::move(first));
            n.children.push_back(expression());
            if (at_op("=")) {
                advance();
                n.children.push_back(rhs());
            } else {
                n.children.push_back(empty());
            }
            return finish(std::move(n));
        }
        if (tok().type == TokenType::Op &&
            std::find(kAugOps.begin(), kAugOps.end(), tok().text) != kAugOps.end()) {
            Node n = start_at(Kind::AugAssign, begin);
            n.op = std::string(advance().text);
            set_ctx(first, Ctx::Store);
            n.children.push_back(std::move(first));
            n.children.push_back(rhs());
            return finish(std::move(n));
        }
        if (at_op("=")) {
            Node n = start_at(Kind::Assign, begin);
            std::vector<Node> parts;
            parts.push_back(std::move(first));
            while (at_op("=")) {
                advance();
                parts.push_back(rhs());
            }
            for (std::size_t i = 0; i + 1 < parts.size(); ++i) set_ctx(parts[i], Ctx::Store);
            n.children = std::move(parts);
            return finish(std::move(n));
        }
        Node n = start_at(Kind::Expr, begin);
        n.children.push_back(std::move(first));
        return finish(std::move(n));
    }

    void set_ctx(Node& n, Ctx ctx) {
        switch (n.kind) {
            case Kind::Name:
            case Kind::Attribute:
            case Kind::Subscript: n.ctx = ctx; return;
            case Kind::Starred: n.ctx = ctx; set_ctx(n.children.at(0), ctx); return;
            case Kind::Tuple:
            case Kind::List:
                n.ctx = ctx;
                for (auto& c : n.children) set_ctx(c, ctx);
                return;
            default:
                throw SyntaxError(n.begin.line, std::string("cannot assign to ") + std::string(kind_name(n.kind)));
        }
    }

    // ---- patterns ------------------------------------------------------

    Node patterns() {
        Position begin = tok().begin;
        Node first = maybe_star_pattern();
        if (!at_op(",")) return first;
        Node seq = start_at(Kind::MatchSequence, begin);
        seq.children.push_back(std::move(first));
        while (at_op(",")) {
            advance();
            if (at_op(":") || at_kw("if")) break;
            seq.children.push_back(maybe_star_pattern());
        }
        return finish(std::move(seq));
    }

    Node maybe_star_pattern() {
        if (at_op("*")) {
            Node s = start(Kind::MatchStar);
            advance();
            s.value = expect_name();
            if (s.value == "_") s.value.clear();
            return finish(std::move(s));
        }
        return pattern();
    }

    Node pattern() {
        Position begin = tok().begin;
        Node alt = or_pattern();
        if (at_kw("as")) {
            advance();
            Node as = start_at(Kind::MatchAs, begin);
            as.value = expect_name();
            as.children.push_back(std::move(alt));
            return finish(std::move(as));
        }
        return alt;
    }

    Node or_pattern() {
        Position begin = tok().begin;
        Node first = closed_pattern();
        if (!at_op("|")) return first;
        Node alt = start_at(Kind::MatchOr, begin);
        alt.children.push_back(std::move(first));
        while (at_op("|")) {
            advance();
            alt.children.push_back(closed_pattern());
        }
        return finish(std::move(alt));
    }

    Node literal_number() {
        Position begin = tok().begin;
        Node value = start(Kind::Constant);
        if (at_op("-")) advance();
        if (tok().type != TokenType::Number) error("expected number");
        advance();
        if ((at_op("+") || at_op("-")) && ahead(1).type == TokenType::Number) {
            advance();
            advance();
        }
        value = finish(std::move(value));
        value.value = std::string(src_.substr(begin.offset - opt_.base_offset, value.end.offset - begin.offset));
        return value;
    }

    Node closed_pattern() {
        const Token& t = tok();
        if (t.type == TokenType::Number || (t.is_op("-") && ahead(1).type == TokenType::Number)) {
            Node v = start(Kind::MatchValue);
            v.children.push_back(literal_number());
            return finish(std::move(v));
        }
        if (t.type == TokenType::String) {
            Node v = start(Kind::MatchValue);
            v.children.push_back(strings());
            return finish(std::move(v));
        }
        if (t.is_name("None") || t.is_name("True") || t.is_name("False")) {
            Node v = start(Kind::MatchSingleton);
            v.value = std::string(advance().text);
            return finish(std::move(v));
        }
        if (t.type == TokenType::Name && !is_keyword(t.text)) {
            Position begin = t.begin;
            Node expr = start(Kind::Name);
            expr.value = std::string(advance().text);
            expr = finish(std::move(expr));
            bool dotted = false;
            while (at_op(".")) {
                advance();
                Node attr = start_at(Kind::Attribute, begin);
                attr.value = expect_name();
                attr.children.push_back(std::move(expr));
                expr = finish(std::move(attr));
                dotted = true;
            }
            if (at_op("(")) return class_pattern(std::move(expr), begin);
            if (dotted) {
                Node v = start_at(Kind::MatchValue, begin);
                v.children.push_back(std::move(expr));
                return finish(std::move(v));
            }
            Node capture = start_at(Kind::MatchAs, begin);
            if (expr.value != "_") capture.value = expr.value;
            return finish(std::move(capture));
        }
        if (t.is_op("(")) {
            Position begin = t.begin;
            advance();
            if (at_op(")")) {
                advance();
                Node seq = start_at(Kind::MatchSequence, begin);
                return finish(std::move(seq));
            }
            Node first = maybe_star_pattern();
            if (at_op(",")) {
                Node seq = start_at(Kind::MatchSequence, begin);
                seq.children.push_back(std::move(first));
                while (at_op(",")) {
                    advance();
                    if (at_op(")")) break;
                    seq.children.push_back(maybe_star_pattern());
                }
                expect_op(")");
                return finish(std::move(seq));
            }
            expect_op(")");
            return first;
        }
        if (t.is_op("[")) {
            Node seq = start(Kind::MatchSequence);
            advance();
            while (!at_op("]")) {
                seq.children.push_back(maybe_star_pattern());
                if (!at_op(",")) break;
                advance();
            }
            expect_op("]");
            return finish(std::move(seq));
        }
        if (t.is_op("{")) {
            Node map = start(Kind::MatchMapping);
            advance();
            std::vector<Node> keys, values;
            while (!at_op("}")) {
                if (at_op("**")) {
                    advance();
                    map.value = expect_name();
                } else {
                    Node key = closed_pattern();
                    expect_op(":");
                    keys.push_back(std::move(key));
                    values.push_back(pattern());
                }
                if (!at_op(",")) break;
                advance();
            }
            expect_op("}");
            for (auto& k : keys) map.children.push_back(std::move(k));
            for (auto& v : values) map.children.push_back(std::move(v));
            return finish(std::move(map));
        }
        error("invalid pattern");
    }

    Node class_pattern(Node cls, Position begin) {
        Node n = start_at(Kind::MatchClass, begin);
        n.children.push_back(std::move(cls));
        expect_op("(");
        while (!at_op(")")) {
            if (tok().type == TokenType::Name && ahead(1).is_op("=")) {
                Node kw = start(Kind::Keyword);
                kw.value = std::string(advance().text);
                advance();
                kw.children.push_back(pattern());
                n.children.push_back(finish(std::move(kw)));
            } else {
                n.children.push_back(pattern());
            }
            if (!at_op(",")) break;
            advance();
        }
        expect_op(")");
        return finish(std::move(n));
    }

    // ---- expressions ---------------------------------------------------

    Node star_expressions() {
        Position begin = tok().begin;
        Node first = star_expression();
        if (!at_op(",")) return first;
        Node tuple = start_at(Kind::Tuple, begin);
        tuple.children.push_back(std::move(first));
        while (at_op(",")) {
            advance();
            if (!starts_expression()) break;
            tuple.children.push_back(star_expression());
        }
        return finish(std::move(tuple));
    }

    Node star_named_expressions_tuple() {
        Position begin = tok().begin;
        Node first = star_named_expression();
        if (!at_op(",")) return first;
        Node tuple = start_at(Kind::Tuple, begin);
        tuple.children.push_back(std::move(first));
        while (at_op(",")) {
            advance();
            if (!starts_expression()) break;
            tuple.children.push_back(star_named_expression());
        }
        return finish(std::move(tuple));
    }

    Node star_expression() {
        if (at_op("*")) {
            Node s = start(Kind::Starred);
            advance();
            s.children.push_back(bitwise_or());
            return finish(std::move(s));
        }
        return expression();
    }

    Node star_named_expression() {
        if (at_op("*")) {
            Node s = start(Kind::Starred);
            advance();
            s.children.push_back(bitwise_or());
            return finish(std::move(s));
        }
        return named_expression();
    }

    Node named_expression() {
        if (tok().type == TokenType::Name && ahead(1).is_op(":=")) {
            Node n = start(Kind::NamedExpr);
            Node target = start(Kind::Name);
            target.value = expect_name();
            target.ctx = Ctx::Store;
            n.children.push_back(finish(std::move(target)));
            advance();  // :=
            n.children.push_back(expression());
            return finish(std::move(n));
        }
        return expression();
    }

    // Comma-separated assignment targets (for-loop and del), without comparisons.
    Node target_list() {
        Position begin = tok().begin;
        Node first = single_target();
        if (!at_op(",")) return first;
        Node tuple = start_at(Kind::Tuple, begin);
        tuple.children.push_back(std::move(first));
        while (at_op(",")) {
            advance();
            if (!starts_expression()) break;
            tuple.children.push_back(single_target());
        }
        return finish(std::move(tuple));
    }

    Node single_target() {
        if (at_op("*")) {
            Node s = start(Kind::Starred);
            advance();
            s.children.push_back(bitwise_or());
            return finish(std::move(s));
        }
        return bitwise_or();
    }

    Node expression() {
        if (at_kw("lambda")) return lambdef();
        Position begin = tok().begin;
        Node body = disjunction();
        if (at_kw("if")) {
            Node n = start_at(Kind::IfExp, begin);
            advance();
            Node test = disjunction();
            expect_kw("else");
            n.children.push_back(std::move(test));
            n.children.push_back(std::move(body));
            n.children.push_back(expression());
            return finish(std::move(n));
        }
        return body;
    }

    Node lambdef() {
        Node n = start(Kind::Lambda);
        advance();
        n.children.push_back(parameters(":", false));
        expect_op(":");
        n.children.push_back(expression());
        return finish(std::move(n));
    }

    Node bool_chain(std::string_view op, Node (Parser::*operand)()) {
        Position begin = tok().begin;
        Node first = (this->*operand)();
        if (!at_kw(op)) return first;
        Node n = start_at(Kind::BoolOp, begin);
        n.op = std::string(op);
        n.children.push_back(std::move(first));
        while (at_kw(op)) {
            advance();
            n.children.push_back((this->*operand)());
        }
        return finish(std::move(n));
    }

    Node disjunction() { return bool_chain("or", &Parser::conjunction); }
    Node conjunction() { return bool_chain("and", &Parser::inversion); }

    Node inversion() {
        if (at_kw("not")) {
            Node n = start(Kind::UnaryOp);
            advance();
            n.op = "not";
            n.children.push_back(inversion());
            return finish(std::move(n));
        }
        return comparison();
    }

    std::optional<std::string> comparison_op() const {
        const Token& t = tok();
        if (t.type == TokenType::Op &&
            (t.text == "<" || t.text == ">" || t.text == "==" || t.text == ">=" || t.text == "<=" ||
             t.text == "!=" || t.text == "<>"))
            return std::string(t.text);
        if (t.is_name("in")) return "in";
        if (t.is_name("is")) return ahead(1).is_name("not") ? "is not" : "is";
        if (t.is_name("not") && ahead(1).is_name("in")) return "not in";
        return std::nullopt;
    }

    Node comparison() {
        Position begin = tok().begin;
        Node first = bitwise_or();
        auto op = comparison_op();
        if (!op) return first;
        Node n = start_at(Kind::Compare, begin);
        n.children.push_back(std::move(first));
        while ((op = comparison_op())) {
            if (*op == "is not" || *op == "not in") advance();
            advance();
            n.op += n.op.empty() ? *op : " " + *op;
            n.children.push_back(bitwise_or());
        }
        return finish(std::move(n));
    }

    Node binary(std::initializer_list<std::string_view> ops, Node (Parser::*operand)()) {
        Position begin = tok().begin;
        Node left = (this->*operand)();
        while (tok().type == TokenType::Op &&
               std::find(ops.begin(), ops.end(), tok().text) != ops.end()) {
            Node n = start_at(Kind::BinOp, begin);
            n.op = std::string(advance().text);
            n.children.push_back(std::move(left));
            n.children.push_back((this->*operand)());
            left = finish(std::move(n));
        }
        return left;
    }

    Node bitwise_or() { return binary({"|"}, &Parser::bitwise_xor); }
    Node bitwise_xor() { return binary({"^"}, &Parser::bitwise_and); }
    Node bitwise_and() { return binary({"&"}, &Parser::shift_expr); }
    Node shift_expr() { return binary({"<<", ">>"}, &Parser::sum); }
    Node sum() { return binary({"+", "-"}, &Parser::term); }
    Node term() { return binary({"*", "/", "//", "%", "@"}, &Parser::factor); }

    Node factor() {
        if (at_op("+") || at_op("-") || at_op("~")) {
            Node n = start(Kind::UnaryOp);
            n.op = std::string(advance().text);
            n.children.push_back(factor());
            return finish(std::move(n));
        }
        return power();
    }

    Node power() {
        Position begin = tok().begin;
        Node base = await_primary();
        if (at_op("**")) {
            Node n = start_at(Kind::BinOp, begin);
            n.op = std::string(advance().text);
            n.children.push_back(std::move(base));
            n.children.push_back(factor());
            return finish(std::move(n));
        }
        return base;
    }

    Node await_primary() {
        if (at_kw("await")) {
            Node n = start(Kind::Await);
            advance();
            n.children.push_back(primary());
            return finish(std::move(n));
        }
        return primary();
    }

    Node primary() {
        Position begin = tok().begin;
        Node expr = atom();
        while (true) {
            if (at_op(".")) {
                advance();
                Node attr = start_at(Kind::Attribute, begin);
                attr.value = expect_name();
                attr.children.push_back(std::move(expr));
                expr = finish(std::move(attr));
            } else if (at_op("(")) {
                advance();
                Node call = start_at(Kind::Call, begin);
                call.children.push_back(std::move(expr));
                for (auto& a : call_arguments()) call.children.push_back(std::move(a));
                expect_op(")");
                expr = finish(std::move(call));
            } else if (at_op("[")) {
                advance();
                Node sub = start_at(Kind::Subscript, begin);
                sub.children.push_back(std::move(expr));
                sub.children.push_back(slices());
                expect_op("]");
                expr = finish(std::move(sub));
            } else {
                return expr;
            }
        }
    }

    std::vector<Node> call_arguments() {
        std::vector<Node> args;
        while (!at_op(")")) {
            if (at_op("*")) {
                Node s = start(Kind::Starred);
                advance();
                s.children.push_back(expression());
                args.push_back(finish(std::move(s)));
            } else if (at_op("**")) {
                Node kw = start(Kind::Keyword);
                advance();
                kw.children.push_back(expression());
                args.push_back(finish(std::move(kw)));
            } else if (tok().type == TokenType::Name && ahead(1).is_op("=")) {
                Node kw = start(Kind::Keyword);
                kw.value = expect_name();
                advance();
                kw.children.push_back(expression());
                args.push_back(finish(std::move(kw)));
            } else {
                Position begin = tok().begin;
                Node arg = named_expression();
                if (at_kw("for") || (at_kw("async") && ahead(1).is_name("for"))) {
                    arg = comprehension(Kind::GeneratorExp, begin, std::move(arg));
                }
                args.push_back(std::move(arg));
            }
            if (!at_op(",")) break;
            advance();
        }
        return args;
    }

    Node slices() {
        Position begin = tok().begin;
        Node first = slice();
        if (!at_op(",")) return first;
        Node tuple = start_at(Kind::Tuple, begin);
        tuple.children.push_back(std::move(first));
        while (at_op(",")) {
            advance();
            if (at_op("]")) break;
            tuple.children.push_back(slice());
        }
        return finish(std::move(tuple));
    }

    Node slice() {
        Position begin = tok().begin;
        if (at_op("*")) return star_named_expression();
        Node lower = empty();
        if (!at_op(":")) {
            lower = named_expression();
            if (!at_op(":")) return lower;
        }
        Node s = start_at(Kind::Slice, begin);
        advance();  // :
        s.children.push_back(std::move(lower));
        s.children.push_back(at_op(":") || at_op("]") || at_op(",") ? empty() : expression());
        if (at_op(":")) {
            advance();
            s.children.push_back(at_op("]") || at_op(",") ? empty() : expression());
        } else {
            s.children.push_back(empty());
        }
        return finish(std::move(s));
    }

    Node comprehension(Kind kind, Position begin, Node elt, Node value = {}) {
        Node n = start_at(kind, begin);
        n.children.push_back(std::move(elt));
        if (kind == Kind::DictComp) n.children.push_back(std::move(value));
        while (at_kw("for") || (at_kw("async") && ahead(1).is_name("for"))) {
            Node c = start(Kind::Comprehension);
            if (at_kw("async")) {
                advance();
                c.flag = true;
            }
            expect_kw("for");
            Node target = target_list();
            set_ctx(target, Ctx::Store);
            c.children.push_back(std::move(target));
            expect_kw("in");
            c.children.push_back(disjunction());
            while (at_kw("if")) {
                advance();
                c.children.push_back(disjunction());
            }
            n.children.push_back(finish(std::move(c)));
        }
        return finish(std::move(n));
    }

    Node yield_expr() {
        Position begin = tok().begin;
        expect_kw("yield");
        if (at_kw("from")) {
            advance();
            Node n = start_at(Kind::YieldFrom, begin);
            n.children.push_back(expression());
            return finish(std::move(n));
        }
        Node n = start_at(Kind::Yield, begin);
        if (starts_expression()) n.children.push_back(star_expressions());
        return finish(std::move(n));
    }

    Node strings() {
        Node n = start(Kind::Constant);
        n.flag = true;
        bool joined = false;
        std::vector<Node> fields;
        std::vector<Node> pieces;
        while (tok().type == TokenType::String) {
            const Token& t = advance();
            Node piece;
            piece.kind = Kind::Constant;
            piece.flag = true;
            piece.value = std::string(t.text);
            piece.begin = t.begin;
            piece.end = t.end;
            pieces.push_back(std::move(piece));
            if (t.fstring) {
                joined = true;
                for (const auto& f : t.fields) fields.push_back(parse_field(t, f));
            }
        }
        n = finish(std::move(n));
        n.value = std::string(src_.substr(n.begin.offset - opt_.base_offset, n.end.offset - n.begin.offset));
        if (joined) {
            n.kind = Kind::JoinedStr;
            n.flag = false;
            n.children = std::move(fields);
        } else {
            n.children = std::move(pieces);
        }
        return n;
    }

    Node parse_field(const Token& t, const FieldRange& f) {
        std::size_t rel_begin = f.begin - opt_.base_offset;
        std::size_t rel_end = f.end - opt_.base_offset;
        std::string_view text = src_.substr(rel_begin, rel_end - rel_begin);
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
        if (text.size() >= 1 && text.back() == '=') {
            char prev = text.size() >= 2 ? text[text.size() - 2] : ' ';
            if (prev != '=' && prev != '!' && prev != '<' && prev != '>') text.remove_suffix(1);
        }
        if (text.find_first_not_of(" \t\r\n") == std::string_view::npos)
            throw SyntaxError(t.begin.line, "f-string: empty expression not allowed");
        TokenizeOptions sub;
        sub.base_offset = f.begin;
        sub.base_line = t.begin.line;
        sub.base_col = t.begin.col;
        std::size_t tok_rel = t.begin.offset - opt_.base_offset;
        for (std::size_t i = tok_rel; i < rel_begin; ++i) {
            char c = src_[i];
            if (c == '\n' || (c == '\r' && (i + 1 >= src_.size() || src_[i + 1] != '\n'))) {
                ++sub.base_line;
                sub.base_col = 0;
            } else {
                ++sub.base_col;
            }
        }
        Parser p(text, sub, true);
        return p.parse_single_expression();
    }

    Node atom() {
        const Token& t = tok();
        switch (t.type) {
            case TokenType::Name: {
                if (t.text == "None" || t.text == "True" || t.text == "False") {
                    Node c = start(Kind::Constant);
                    c.value = std::string(advance().text);
                    return finish(std::move(c));
                }
                if (is_keyword(t.text)) error("invalid syntax");
                Node n = start(Kind::Name);
                n.value = std::string(advance().text);
                return finish(std::move(n));
            }
            case TokenType::Number: {
                Node c = start(Kind::Constant);
                c.value = std::string(advance().text);
                return finish(std::move(c));
            }
            case TokenType::String: return strings();
            case TokenType::Op: break;
            default: error("invalid syntax");
        }
        if (t.text == "...") {
            Node c = start(Kind::Constant);
            c.value = "...";
            advance();
            return finish(std::move(c));
        }
        if (t.text == "(") return paren_atom();
        if (t.text == "[") return list_atom();
        if (t.text == "{") return brace_atom();
        error("invalid syntax");
    }

    Node paren_atom() {
        Position begin = tok().begin;
        advance();
        if (at_op(")")) {
            advance();
            Node tuple = start_at(Kind::Tuple, begin);
            return finish(std::move(tuple));
        }
        if (at_kw("yield")) {
            Node y = yield_expr();
            expect_op(")");
            return y;
        }
        Position inner = tok().begin;
        Node first = star_named_expression();
        if (at_kw("for") || (at_kw("async") && ahead(1).is_name("for"))) {
            Node gen = comprehension(Kind::GeneratorExp, inner, std::move(first));
            expect_op(")");
            return gen;
        }
        if (at_op(",")) {
            Node tuple = start_at(Kind::Tuple, begin);
            tuple.children.push_back(std::move(first));
            while (at_op(",")) {
                advance();
                if (at_op(")")) break;
                tuple.children.push_back(star_named_expression());
            }
            expect_op(")");
            return finish(std::move(tuple));
        }
        expect_op(")");
        return first;
    }

    Node list_atom() {
        Position begin = tok().begin;
        advance();
        Node list = start_at(Kind::List, begin);
        if (at_op("]")) {
            advance();
            return finish(std::move(list));
        }
        Node first = star_named_expression();
        if (at_kw("for") || (at_kw("async") && ahead(1).is_name("for"))) {
            Node comp = comprehension(Kind::ListComp, begin, std::move(first));
            expect_op("]");
            comp.end = last_end_;
            return comp;
        }
        list.children.push_back(std::move(first));
        while (at_op(",")) {
            advance();
            if (at_op("]")) break;
            list.children.push_back(star_named_expression());
        }
        expect_op("]");
        return finish(std::move(list));
    }

    Node dict_item() {
        Node item = start(Kind::DictItem);
        if (at_op("**")) {
            advance();
            item.children.push_back(empty());
            item.children.push_back(bitwise_or());
        } else {
            item.children.push_back(expression());
            expect_op(":");
            item.children.push_back(expression());
        }
        return finish(std::move(item));
    }

    Node brace_atom() {
        Position begin = tok().begin;
        advance();
        if (at_op("}")) {
            advance();
            Node d = start_at(Kind::Dict, begin);
            return finish(std::move(d));
        }
        if (at_op("**")) {
            Node d = start_at(Kind::Dict, begin);
            while (!at_op("}")) {
                d.children.push_back(dict_item());
                if (!at_op(",")) break;
                advance();
            }
            expect_op("}");
            return finish(std::move(d));
        }
        Node first = star_named_expression();
        if (at_op(":")) {
            advance();
            Node value = expression();
            if (at_kw("for") || (at_kw("async") && ahead(1).is_name("for"))) {
                Node comp = comprehension(Kind::DictComp, begin, std::move(first), std::move(value));
                expect_op("}");
                comp.end = last_end_;
                return comp;
            }
            Node d = start_at(Kind::Dict, begin);
            Node item = start_at(Kind::DictItem, first.begin);
            item.children.push_back(std::move(first));
            item.children.push_back(std::move(value));
            d.children.push_back(finish(std::move(item)));
            while (at_op(",")) {
                advance();
                if (at_op("}")) break;
                d.children.push_back(dict_item());
            }
            expect_op("}");
            return finish(std::move(d));
        }
        if (at_kw("for") || (at_kw("async") && ahead(1).is_name("for"))) {
            Node comp = comprehension(Kind::SetComp, begin, std::move(first));
            expect_op("}");
            comp.end = last_end_;
            return comp;
        }
        Node s = start_at(Kind::Set, begin);
        s.children.push_back(std::move(first));
        while (at_op(",")) {
            advance();
            if (at_op("}")) break;
            s.children.push_back(star_named_expression());
        }
        expect_op("}");
        return finish(std::move(s));
    }

    std::string_view src_;
    TokenizeOptions opt_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Position last_end_;
};

}  // namespace

ParseResult parse_module(std::string_view source, const TokenizeOptions& options) {
    try {
        Parser p(source, options);
        return p.parse_file_recovering();
    } catch (const SyntaxError& e) {
        ParseResult result;
        result.module.kind = Kind::Module;
        result.errors.push_back({e.line(), e.message()});
        result.fatal = true;
        return result;
    }
}

Node parse_module_strict(std::string_view source, const TokenizeOptions& options) {
    Parser p(source, options);
    return p.parse_file_strict();
}

Node parse_expression(std::string_view source, const TokenizeOptions& options) {
    Parser p(source, options, true);
    return p.parse_single_expression();
}

std::string dedent(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start + 1));
        start = nl + 1;
        if (start == text.size()) break;
    }
    std::optional<std::string_view> common;
    for (auto line : lines) {
        auto content = line.find_first_not_of(" \t");
        if (content == std::string_view::npos || line[content] == '\n' || line[content] == '\r') continue;
        auto indent = line.substr(0, content);
        if (!common) {
            common = indent;
        } else {
            std::size_t k = 0;
            while (k < common->size() && k < indent.size() && (*common)[k] == indent[k]) ++k;
            common = common->substr(0, k);
        }
    }
    std::string out;
    out.reserve(text.size());
    std::size_t cut = common ? common->size() : 0;
    for (auto line : lines) {
        auto content = line.find_first_not_of(" \t");
        bool blank = content == std::string_view::npos || line[content] == '\n' || line[content] == '\r';
        if (blank) {
            auto nl = line.find_first_of("\r\n");
            out += nl == std::string_view::npos ? std::string_view{} : line.substr(nl);
        } else {
            out += line.substr(std::min(cut, line.size()));
        }
    }
    return out;
}

}  // namespace hydra::python
