#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hydra/python/tokenizer.hpp"

namespace hydra::python {

/// Node kinds, named after CPython's `ast` classes. Child layout per kind:
///
///   Module            children = statements
///   FunctionDef       value = name, flag = async;
///                     children = [Group decorators, Group type_params, Group params, returns|Empty, Group body]
///   ClassDef          value = name; children = [Group decorators, Group type_params, Group bases, Group body]
///   Param             value = name (empty for bare `*` or `/`), op = "", "*" or "**";
///                     children = [annotation|Empty, default|Empty]
///   Lambda            children = [Group params, body]
///   Return/Expr/Await/Starred/YieldFrom/Decorator   children = [value] (Return may be empty)
///   Yield             children = [value] or []
///   Delete            children = targets
///   Assign            children = [targets..., value]
///   AugAssign         op = operator; children = [target, value]
///   AnnAssign         children = [target, annotation, value|Empty]
///   For/While/If      For: flag = async, [target, iter, Group body, Group orelse];
///                     While/If: [test, Group body, Group orelse]
///   With              flag = async; children = [Group items, Group body]
///   WithItem          children = [context_expr, optional_vars|Empty]
///   Try               children = [Group body, Group handlers, Group orelse, Group finalbody]
///   ExceptHandler     value = bound name; children = [type|Empty, Group body]
///   Raise             children = [exc|Empty, cause|Empty]
///   Assert            children = [test, msg|Empty]
///   Import/ImportFrom children = Alias...; ImportFrom: value = module, level = dots
///   Alias             value = dotted name, aux = asname ("" if none)
///   Global/Nonlocal   children = Identifier...
///   Pass/Break/Continue
///   Match             children = [subject, MatchCase...]
///   MatchCase         children = [pattern, guard|Empty, Group body]
///   TypeAlias         children = [Name target, Group type_params, value]
///   TypeParam         value = name; children = [bound|Empty]
///
///   BoolOp/BinOp/UnaryOp/Compare  op = operator text; children = operands
///   NamedExpr         children = [Name target, value]
///   IfExp             children = [test, body, orelse]
///   Dict              children = DictItem... (DictItem = [key, value]; `**x` is DictItem [Empty, value])
///   Set/List/Tuple    children = elements; ctx
///   ListComp/SetComp/GeneratorExp  children = [elt, Comprehension...]
///   DictComp          children = [key, value, Comprehension...]
///   Comprehension     flag = async; children = [target, iter, ifs...]
///   Call              children = [func, args...] (args: expr, Starred, Keyword)
///   Keyword           value = name ("" for `**x`); children = [value]
///   Attribute         value = attr; children = [object]; ctx
///   Subscript         children = [object, slice]; ctx
///   Slice             children = [lower|Empty, upper|Empty, step|Empty]
///   Name              value = identifier; ctx
///   Constant          value = literal source text; flag = string literal
///   JoinedStr         children = replacement-field expressions
///
///   Patterns (match/case): MatchValue [expr], MatchSingleton, MatchSequence [patterns],
///   MatchMapping [keys..., patterns...] (value = rest name), MatchClass [cls, patterns..., Keyword...],
///   MatchStar (value = name), MatchAs (value = name; children = [pattern] or []), MatchOr [patterns]
enum class Kind : std::uint8_t {
    Module, FunctionDef, ClassDef, Param, Lambda, Return, Expr, Await, Starred, Yield, YieldFrom, Decorator,
    Delete, Assign, AugAssign, AnnAssign, For, While, If, With, WithItem, Try, ExceptHandler, Raise, Assert,
    Import, ImportFrom, Alias, Global, Nonlocal, Identifier, Pass, Break, Continue, Match, MatchCase,
    TypeAlias, TypeParam,
    BoolOp, BinOp, UnaryOp, Compare, NamedExpr, IfExp, Dict, DictItem, Set, List, Tuple, ListComp, SetComp,
    GeneratorExp, DictComp, Comprehension, Call, Keyword, Attribute, Subscript, Slice, Name, Constant, JoinedStr,
    MatchValue, MatchSingleton, MatchSequence, MatchMapping, MatchClass, MatchStar, MatchAs, MatchOr,
    Group, Empty
};

enum class Ctx : std::uint8_t { Load, Store, Del };

std::string_view kind_name(Kind kind);

struct Node {
    Kind kind = Kind::Empty;
    std::string value;
    std::string aux;
    std::string op;
    int level = 0;
    bool flag = false;
    Ctx ctx = Ctx::Load;
    Position begin;
    Position end;
    // FunctionDef/ClassDef only: from `def`/`async`/`class` through the header colon.
    Position header_begin;
    Position header_end;
    std::vector<Node> children;

    bool empty() const { return kind == Kind::Empty; }
    const Node& child(std::size_t i) const { return children.at(i); }
    Node& child(std::size_t i) { return children.at(i); }
};

struct ParseError {
    int line = 0;
    std::string message;
};

/// Result of parsing one source file. Statements that fail to parse are
/// skipped (their error recorded) and parsing resumes at the next top-level
/// statement; a lexical failure is fatal and leaves `module` empty.
struct ParseResult {
    Node module;
    std::vector<ParseError> errors;
    bool fatal = false;
};

}  // namespace hydra::python
