#include "hydra/dependency_oracle.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "hydra/parallel.hpp"
#include "hydra/python/parser.hpp"

namespace hydra {

using python::Kind;
using python::Node;

KindSet all_kinds() { return {UnitKind::Function, UnitKind::Class, UnitKind::Variable}; }

KindSet parse_kinds(std::string_view text) {
    KindSet out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        std::string_view part = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!part.empty() && std::isspace(static_cast<unsigned char>(part.front()))) part.remove_prefix(1);
        while (!part.empty() && std::isspace(static_cast<unsigned char>(part.back()))) part.remove_suffix(1);
        if (!part.empty()) {
            std::string lower;
            for (char c : part) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            out.insert(parse_unit_kind(lower));
        }
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument("empty kind list");
    return out;
}

Query make_query(const CodeUnit& anchor) {
    Query q{anchor.id, anchor.signature};
    if (anchor.docstring) q.text += "\n" + *anchor.docstring;
    return q;
}

CandidateScope candidate_scope(const CodeGraph& graph, std::string_view anchor_id, const ScopeOptions& options) {
    const CodeUnit* anchor = graph.lookup(anchor_id);
    if (!anchor) throw std::invalid_argument("unknown anchor: " + std::string(anchor_id));
    if (anchor->kind != UnitKind::Function)
        throw std::invalid_argument("anchor is not a function: " + std::string(anchor_id));

    std::set<std::string> excluded = {anchor->id};
    for (auto parent = anchor->parent_class; parent;) {
        excluded.insert(*parent);
        const CodeUnit* p = graph.lookup(*parent);
        parent = p ? p->parent_class : std::nullopt;
    }

    std::vector<std::string> files = {anchor->span.file_path};
    for (const auto& f : graph.imported_files(anchor->span.file_path)) files.push_back(f);

    CandidateScope scope{anchor->id, {}};
    for (const auto& f : files) {
        for (const CodeUnit* u : graph.units_in(f)) {
            if (excluded.count(u->id) || !options.kinds.count(u->kind)) continue;
            if (!options.include_methods && u->is_method()) continue;
            scope.candidate_ids.push_back(u->id);
        }
    }
    return scope;
}

struct DependencyOracle::FileTable {
    std::map<std::string, std::vector<std::string>> names;  // local binding -> unit ids
    std::map<std::string, std::string> modules;             // local dotted binding -> file
};

namespace {

using Table = DependencyOracle::FileTable;

struct Scope {
    bool is_class = false;
    std::set<std::string> locals;
    std::set<std::string> globals;
    const Scope* parent = nullptr;
};

void collect_walrus(const Node& n, Scope& s) {
    if (n.kind == Kind::Lambda || n.kind == Kind::FunctionDef || n.kind == Kind::ClassDef) return;
    if (n.kind == Kind::NamedExpr) s.locals.insert(n.child(0).value);
    for (const auto& c : n.children) collect_walrus(c, s);
}

// Names bound in one scope, not descending into nested scopes.
void collect_bindings(const Node& n, Scope& s) {
    switch (n.kind) {
        case Kind::FunctionDef:
        case Kind::ClassDef: s.locals.insert(n.value); return;
        case Kind::Lambda:
        case Kind::Import:
        case Kind::ImportFrom: return;
        case Kind::ListComp:
        case Kind::SetComp:
        case Kind::GeneratorExp:
        case Kind::DictComp: collect_walrus(n, s); return;
        case Kind::Name:
            if (n.ctx != python::Ctx::Load) s.locals.insert(n.value);
            return;
        case Kind::Global:
            for (const auto& id : n.children) s.globals.insert(id.value);
            return;
        case Kind::Nonlocal:
            for (const auto& id : n.children) s.locals.insert(id.value);
            return;
        case Kind::ExceptHandler:
        case Kind::MatchAs:
        case Kind::MatchStar:
        case Kind::MatchMapping:
            if (!n.value.empty()) s.locals.insert(n.value);
            break;
        default: break;
    }
    for (const auto& c : n.children) collect_bindings(c, s);
}

void finish_bindings(Scope& s) {
    for (const auto& g : s.globals) s.locals.erase(g);
}

class Analyzer {
public:
    Analyzer(const CodeGraph& graph, const Table& table, const std::set<std::string>& in_scope,
             const std::map<std::string, std::vector<std::string>>& methods_by_name,
             const std::map<std::pair<std::string, std::string>, std::vector<std::string>>& by_qname)
        : graph_(graph), table_(table), in_scope_(in_scope), methods_(methods_by_name), by_qname_(by_qname) {}

    void anchor(const Node& fn) { function(fn, nullptr); }

    const std::set<std::string>& hits() const { return hits_; }

private:
    bool is_local(const std::string& name, const Scope* s) const {
        bool first = true;
        for (const Scope* cur = s; cur; cur = cur->parent) {
            if (cur->is_class && !first) continue;
            first = false;
            if (cur->globals.count(name)) return false;
            if (cur->locals.count(name)) return true;
        }
        return false;
    }

    void record(const std::string& id, bool is_call) {
        if (!in_scope_.count(id)) return;
        const CodeUnit* u = graph_.lookup(id);
        if (u->kind == UnitKind::Function && !is_call) return;
        hits_.insert(id);
    }

    const std::vector<std::string>* members(const std::string& unit_id, const std::string& attr) const {
        const CodeUnit* u = graph_.lookup(unit_id);
        if (!u || u->kind != UnitKind::Class) return nullptr;
        auto it = by_qname_.find({u->span.file_path, u->qualified_name + "." + attr});
        return it == by_qname_.end() ? nullptr : &it->second;
    }

    // `units` are what chain element `pos` resolved to (-1 = the base name).
    void follow(const std::vector<std::string>& units, const std::vector<std::string>& attrs, int pos, bool is_call,
                bool store) {
        bool final = pos + 1 == static_cast<int>(attrs.size());
        for (const auto& id : units) {
            if (!(final && store)) record(id, final && is_call);
            if (final) continue;
            if (const auto* next = members(id, attrs[pos + 1])) follow(*next, attrs, pos + 1, is_call, store);
        }
    }

    void resolve_chain(const std::string& base, const std::vector<std::string>& attrs, bool is_call, bool store) {
        for (int k = static_cast<int>(attrs.size()); k >= 0; --k) {
            std::string dotted = base;
            for (int i = 0; i < k; ++i) dotted += "." + attrs[i];
            auto mod = table_.modules.find(dotted);
            if (mod == table_.modules.end()) continue;
            if (k == static_cast<int>(attrs.size())) return;
            auto it = by_qname_.find({mod->second, attrs[k]});
            if (it != by_qname_.end()) follow(it->second, attrs, k, is_call, store);
            return;
        }
        auto it = table_.names.find(base);
        if (it != table_.names.end()) follow(it->second, attrs, -1, is_call, store);
    }

    // Splits a pure Name/Attribute chain; returns nullptr base when the chain
    // bottoms out in some other expression.
    static const Node* split_chain(const Node& expr, std::vector<std::string>& attrs) {
        const Node* cur = &expr;
        while (cur->kind == Kind::Attribute) {
            attrs.push_back(cur->value);
            cur = &cur->child(0);
        }
        std::reverse(attrs.begin(), attrs.end());
        return cur;
    }

    bool names_module(const Node& obj, const Scope* s) const {
        std::vector<std::string> attrs;
        const Node* base = split_chain(obj, attrs);
        if (base->kind != Kind::Name || is_local(base->value, s)) return false;
        std::string dotted = base->value;
        for (const auto& a : attrs) dotted += "." + a;
        return table_.modules.count(dotted) != 0;
    }

    void reference(const Node& expr, const Scope* s, bool is_call) {
        if (expr.kind == Kind::Name) {
            if (expr.ctx == python::Ctx::Load && !is_local(expr.value, s)) resolve_chain(expr.value, {}, is_call, false);
            return;
        }
        if (expr.kind == Kind::Attribute) {
            std::vector<std::string> attrs;
            const Node* base = split_chain(expr, attrs);
            if (base->kind == Kind::Name) {
                if (!is_local(base->value, s))
                    resolve_chain(base->value, attrs, is_call, expr.ctx != python::Ctx::Load);
            } else {
                visit(*base, s);
            }
            return;
        }
        visit(expr, s);
    }

    void visit_params(const Node& params, const Scope* s) {
        for (const auto& p : params.children) {
            for (const auto& c : p.children) {
                if (!c.empty()) visit(c, s);
            }
        }
    }

    void function(const Node& fn, const Scope* s) {
        for (const auto& d : fn.child(0).children) reference(d.child(0), s, true);
        visit_params(fn.child(2), s);
        if (!fn.child(3).empty()) visit(fn.child(3), s);
        Scope inner;
        inner.parent = s;
        for (const auto& p : fn.child(2).children) {
            if (!p.value.empty()) inner.locals.insert(p.value);
        }
        for (const auto& stmt : fn.child(4).children) collect_bindings(stmt, inner);
        finish_bindings(inner);
        for (const auto& stmt : fn.child(4).children) visit(stmt, &inner);
    }

    void class_def(const Node& cls, const Scope* s) {
        for (const auto& d : cls.child(0).children) reference(d.child(0), s, true);
        for (const auto& b : cls.child(2).children) visit(b, s);
        Scope inner;
        inner.is_class = true;
        inner.parent = s;
        for (const auto& stmt : cls.child(3).children) collect_bindings(stmt, inner);
        finish_bindings(inner);
        for (const auto& stmt : cls.child(3).children) visit(stmt, &inner);
    }

    void lambda(const Node& lam, const Scope* s) {
        visit_params(lam.child(0), s);
        Scope inner;
        inner.parent = s;
        for (const auto& p : lam.child(0).children) {
            if (!p.value.empty()) inner.locals.insert(p.value);
        }
        collect_walrus(lam.child(1), inner);
        visit(lam.child(1), &inner);
    }

    void comprehension(const Node& comp, const Scope* s) {
        Scope inner;
        inner.parent = s;
        std::size_t first_gen = comp.kind == Kind::DictComp ? 2 : 1;
        for (std::size_t i = first_gen; i < comp.children.size(); ++i) collect_bindings(comp.child(i).child(0), inner);
        for (std::size_t i = first_gen; i < comp.children.size(); ++i) {
            const Node& gen = comp.child(i);
            visit(gen.child(0), &inner);
            visit(gen.child(1), i == first_gen ? s : &inner);
            for (std::size_t j = 2; j < gen.children.size(); ++j) visit(gen.child(j), &inner);
        }
        for (std::size_t i = 0; i < first_gen; ++i) visit(comp.child(i), &inner);
    }

    void call(const Node& n, const Scope* s) {
        const Node& func = n.child(0);
        reference(func, s, true);
        if (func.kind == Kind::Attribute && !names_module(func.child(0), s)) {
            auto it = methods_.find(func.value);
            if (it != methods_.end())
                for (const auto& id : it->second) hits_.insert(id);
        }
        for (std::size_t i = 1; i < n.children.size(); ++i) visit(n.child(i), s);
    }

    void visit(const Node& n, const Scope* s) {
        switch (n.kind) {
            case Kind::FunctionDef: function(n, s); return;
            case Kind::ClassDef: class_def(n, s); return;
            case Kind::Lambda: lambda(n, s); return;
            case Kind::ListComp:
            case Kind::SetComp:
            case Kind::GeneratorExp:
            case Kind::DictComp: comprehension(n, s); return;
            case Kind::Call: call(n, s); return;
            case Kind::Decorator: reference(n.child(0), s, true); return;
            case Kind::Name:
            case Kind::Attribute: reference(n, s, false); return;
            case Kind::AugAssign: {
                const Node& target = n.child(0);
                if (target.kind == Kind::Name) {
                    if (!is_local(target.value, s)) resolve_chain(target.value, {}, false, false);
                } else {
                    // obj.attr += v reads obj.attr
                    Node load = target;
                    load.ctx = python::Ctx::Load;
                    reference(load, s, false);
                }
                visit(n.child(1), s);
                return;
            }
            case Kind::Import:
            case Kind::ImportFrom:
            case Kind::Global:
            case Kind::Nonlocal: return;
            default:
                for (const auto& c : n.children) visit(c, s);
        }
    }

    const CodeGraph& graph_;
    const Table& table_;
    const std::set<std::string>& in_scope_;
    const std::map<std::string, std::vector<std::string>>& methods_;
    const std::map<std::pair<std::string, std::string>, std::vector<std::string>>& by_qname_;
    std::set<std::string> hits_;
};

const Node* find_function(const Node& module, std::string_view name) {
    const Node* first = nullptr;
    for (const auto& stmt : module.children) {
        if (stmt.kind != Kind::FunctionDef) continue;
        if (stmt.value == name) return &stmt;
        if (!first) first = &stmt;
    }
    return first;
}

using QnameIndex = std::map<std::pair<std::string, std::string>, std::vector<std::string>>;

}  // namespace

DependencyOracle::DependencyOracle(const CodeGraph& graph) : graph_(graph) {
    std::map<std::string, std::vector<const CodeUnit*>> top_level;
    for (const auto& u : graph.units()) {
        if (u.is_top_level()) top_level[u.span.file_path].push_back(&u);
        by_qname_[{u.span.file_path, u.qualified_name}].push_back(u.id);
    }
    for (const auto& file : graph.files()) {
        auto table = std::make_shared<FileTable>();
        for (const CodeUnit* u : top_level[file]) table->names[u->qualified_name].push_back(u->id);
        for (const ImportEdge* e : graph.edges_from(file)) {
            const auto& targets = top_level[e->to_file];
            for (const auto& entry : e->imported_names) {
                if (entry == ImportEdge::kStar) {
                    for (const CodeUnit* u : targets) table->names[u->qualified_name].push_back(u->id);
                    continue;
                }
                auto [name, local] = parse_imported_name(entry);
                for (const CodeUnit* u : targets) {
                    if (u->qualified_name == name) table->names[local].push_back(u->id);
                }
            }
            for (const auto& alias : e->module_aliases) table->modules[alias] = e->to_file;
        }
        tables_.emplace(file, std::move(table));
    }
}

namespace {

std::vector<std::string> run_analysis(const CodeGraph& graph, const Table& table, const QnameIndex& by_qname,
                                      const CandidateScope& scope, const Node& fn) {
    std::set<std::string> in_scope(scope.candidate_ids.begin(), scope.candidate_ids.end());
    std::map<std::string, std::vector<std::string>> methods;
    for (const auto& id : scope.candidate_ids) {
        const CodeUnit* u = graph.lookup(id);
        if (u && u->is_method()) methods[std::string(u->short_name())].push_back(id);
    }
    Analyzer analyzer(graph, table, in_scope, methods, by_qname);
    analyzer.anchor(fn);
    std::vector<std::string> out;
    for (const auto& id : scope.candidate_ids) {
        if (analyzer.hits().count(id)) out.push_back(id);
    }
    return out;
}

}  // namespace

std::vector<std::string> DependencyOracle::analyze(const CandidateScope& scope) const {
    const CodeUnit* anchor = graph_.lookup(scope.anchor_id);
    if (!anchor) throw std::invalid_argument("unknown anchor: " + scope.anchor_id);
    python::TokenizeOptions opts;
    opts.first_line_indent = anchor->span.start_col;
    Node module = python::parse_module_strict(anchor->body_text, opts);
    const Node* fn = find_function(module, anchor->short_name());
    if (!fn) throw std::runtime_error("anchor body is not a function definition: " + anchor->id);
    return run_analysis(graph_, *tables_.at(anchor->span.file_path), by_qname_, scope, *fn);
}

std::optional<std::vector<std::string>> DependencyOracle::analyze_source(const CandidateScope& scope,
                                                                         std::string_view source) const {
    const CodeUnit* anchor = graph_.lookup(scope.anchor_id);
    if (!anchor) throw std::invalid_argument("unknown anchor: " + scope.anchor_id);
    Node module;
    try {
        module = python::parse_module_strict(python::dedent(source));
    } catch (const python::SyntaxError&) {
        return std::nullopt;
    }
    const Node* fn = find_function(module, anchor->short_name());
    if (!fn) return std::nullopt;
    return run_analysis(graph_, *tables_.at(anchor->span.file_path), by_qname_, scope, *fn);
}

std::vector<std::string> analyze_dependencies(const CodeGraph& graph, std::string_view anchor_id,
                                              const CandidateScope& scope) {
    if (scope.anchor_id != anchor_id) throw std::invalid_argument("scope was computed for a different anchor");
    return DependencyOracle(graph).analyze(scope);
}

nlohmann::json to_json(const Triplet& t) {
    return nlohmann::json{{"query", {{"anchor_id", t.query.anchor_id}, {"text", t.query.text}}},
                          {"positives", t.positives},
                          {"negatives", t.negatives}};
}

Triplet triplet_from_json(const nlohmann::json& j) {
    Triplet t;
    t.query.anchor_id = j.at("query").at("anchor_id").get<std::string>();
    t.query.text = j.at("query").at("text").get<std::string>();
    t.positives = j.at("positives").get<std::vector<std::string>>();
    t.negatives = j.at("negatives").get<std::vector<std::string>>();
    return t;
}

std::vector<Triplet> build_triplets(const CodeGraph& graph, const ScopeOptions& options, unsigned jobs) {
    std::vector<const CodeUnit*> anchors;
    for (const auto& u : graph.units()) {
        if (u.kind == UnitKind::Function) anchors.push_back(&u);
    }
    DependencyOracle oracle(graph);
    std::vector<std::optional<Triplet>> slots(anchors.size());
    parallel_for(anchors.size(), jobs, [&](std::size_t i) {
        CandidateScope scope = candidate_scope(graph, anchors[i]->id, options);
        if (scope.candidate_ids.empty()) return;
        auto positives = oracle.analyze(scope);
        std::set<std::string> pos(positives.begin(), positives.end());
        Triplet t{make_query(*anchors[i]), positives, {}};
        for (const auto& id : scope.candidate_ids) {
            if (!pos.count(id)) t.negatives.push_back(id);
        }
        slots[i] = std::move(t);
    });
    std::vector<Triplet> out;
    for (auto& s : slots) {
        if (s) out.push_back(std::move(*s));
    }
    return out;
}

}  // namespace hydra
