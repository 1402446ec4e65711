#include "hydra/extractor.hpp"

#include <fnmatch.h>

#include <filesystem>
#include <stdexcept>

#include "hydra/import_resolver.hpp"
#include "hydra/jsonl.hpp"
#include "hydra/parallel.hpp"
#include "hydra/python/parser.hpp"
#include "hydra/python/string_literal.hpp"

namespace hydra {

namespace fs = std::filesystem;
using python::Kind;
using python::Node;

std::string format_diagnostic(const Diagnostic& d) {
    std::string out = d.file;
    if (d.line > 0) out += ":" + std::to_string(d.line);
    return out + ": " + d.message;
}

ParsedFile parse_file(std::string path, std::string source) {
    ParsedFile file;
    file.path = std::move(path);
    file.source = std::move(source);
    auto result = python::parse_module(file.source);
    file.module = std::move(result.module);
    file.parse_errors = std::move(result.errors);
    file.fatal = result.fatal;
    return file;
}

namespace {

class UnitCollector {
public:
    explicit UnitCollector(const ParsedFile& file) : file_(file) {}

    std::vector<CodeUnit> run() {
        module_body(file_.module.children);
        return std::move(units_);
    }

private:
    // Bodies of compound statements that run at the enclosing level.
    static std::vector<const Node*> nested_bodies(const Node& stmt) {
        std::vector<const Node*> out;
        switch (stmt.kind) {
            case Kind::If:
            case Kind::While: out = {&stmt.child(1), &stmt.child(2)}; break;
            case Kind::For: out = {&stmt.child(2), &stmt.child(3)}; break;
            case Kind::With: out = {&stmt.child(1)}; break;
            case Kind::Try:
                out.push_back(&stmt.child(0));
                for (const auto& h : stmt.child(1).children) out.push_back(&h.children.back());
                out.push_back(&stmt.child(2));
                out.push_back(&stmt.child(3));
                break;
            case Kind::Match:
                for (std::size_t i = 1; i < stmt.children.size(); ++i) out.push_back(&stmt.child(i).children.back());
                break;
            default: break;
        }
        return out;
    }

    void module_body(const std::vector<Node>& stmts) {
        for (const auto& s : stmts) {
            switch (s.kind) {
                case Kind::FunctionDef: add_definition(s, UnitKind::Function, s.value, std::nullopt); break;
                case Kind::ClassDef: add_class(s, "", std::nullopt); break;
                case Kind::Assign:
                    for (std::size_t i = 0; i + 1 < s.children.size(); ++i) add_targets(s, s.child(i));
                    break;
                case Kind::AnnAssign:
                    if (s.child(0).kind == Kind::Name) add_variable(s, s.child(0).value);
                    break;
                case Kind::TypeAlias: add_variable(s, s.child(0).value); break;
                default:
                    for (const Node* body : nested_bodies(s)) module_body(body->children);
            }
        }
    }

    void class_body(const std::vector<Node>& stmts, const std::string& qname, const std::string& class_id) {
        for (const auto& s : stmts) {
            if (s.kind == Kind::FunctionDef) {
                add_definition(s, UnitKind::Function, qname + "." + s.value, class_id);
            } else if (s.kind == Kind::ClassDef) {
                add_class(s, qname + ".", class_id);
            } else {
                for (const Node* body : nested_bodies(s)) class_body(body->children, qname, class_id);
            }
        }
    }

    void add_class(const Node& cls, const std::string& prefix, const std::optional<std::string>& parent) {
        std::string qname = prefix + cls.value;
        std::string id = add_definition(cls, UnitKind::Class, qname, parent);
        class_body(cls.child(3).children, qname, id);
    }

    void add_targets(const Node& stmt, const Node& target) {
        switch (target.kind) {
            case Kind::Name: add_variable(stmt, target.value); break;
            case Kind::Starred: add_targets(stmt, target.child(0)); break;
            case Kind::Tuple:
            case Kind::List:
                for (const auto& e : target.children) add_targets(stmt, e);
                break;
            default: break;  // attribute and subscript targets bind no module name
        }
    }

    std::string next_id(const std::string& qname, UnitKind kind) {
        int ordinal = ++ordinals_[make_unit_id(file_.path, qname, kind)];
        return make_unit_id(file_.path, qname, kind, ordinal);
    }

    CodeUnit base_unit(const Node& node, UnitKind kind, const std::string& qname) {
        CodeUnit u;
        u.id = next_id(qname, kind);
        u.kind = kind;
        u.qualified_name = qname;
        u.span.file_path = file_.path;
        u.span.start_line = node.begin.line;
        u.span.end_line = node.end.line;
        u.span.start_byte = node.begin.offset;
        u.span.end_byte = node.end.offset;
        u.span.start_col = node.begin.col;
        u.body_text = file_.source.substr(node.begin.offset, node.end.offset - node.begin.offset);
        return u;
    }

    std::string add_definition(const Node& node, UnitKind kind, const std::string& qname,
                               const std::optional<std::string>& parent) {
        CodeUnit u = base_unit(node, kind, qname);
        u.signature =
            file_.source.substr(node.header_begin.offset, node.header_end.offset - node.header_begin.offset);
        u.docstring = python::docstring_of(node.children.back());
        u.parent_class = parent;
        units_.push_back(std::move(u));
        return units_.back().id;
    }

    void add_variable(const Node& stmt, const std::string& name) {
        CodeUnit u = base_unit(stmt, UnitKind::Variable, name);
        auto nl = u.body_text.find_first_of("\r\n");
        u.signature = u.body_text.substr(0, nl);
        units_.push_back(std::move(u));
    }

    const ParsedFile& file_;
    std::vector<CodeUnit> units_;
    std::map<std::string, int> ordinals_;
};

void collect_imports(const Node& node, std::vector<const Node*>& out) {
    if (node.kind == Kind::Import || node.kind == Kind::ImportFrom) {
        out.push_back(&node);
        return;
    }
    for (const auto& c : node.children) collect_imports(c, out);
}

struct EdgeAccumulator {
    std::set<std::string> names;
    std::set<std::string> aliases;
};

std::string top_level_name(std::string_view dotted) { return std::string(dotted.substr(0, dotted.find('.'))); }

std::string module_display(const Node& imp) { return std::string(imp.level, '.') + imp.value; }

}  // namespace

std::vector<CodeUnit> extract_units(const ParsedFile& file) {
    if (file.fatal) return {};
    return UnitCollector(file).run();
}

std::vector<ImportEdge> extract_imports(const ParsedFile& file, const std::set<std::string>& repo_files,
                                        std::vector<Diagnostic>* diagnostics) {
    if (file.fatal) return {};
    ModuleResolver resolver(repo_files);
    std::map<std::string, EdgeAccumulator> edges;
    auto warn = [&](const Node& at, const std::string& message) {
        if (diagnostics) diagnostics->push_back({file.path, at.begin.line, message});
    };
    auto in_repo = [&](std::string_view module) {
        auto top = resolver.lookup(file.path, top_level_name(module), 0);
        return top.has_value();
    };

    std::vector<const Node*> imports;
    collect_imports(file.module, imports);
    for (const Node* imp : imports) {
        if (imp->kind == Kind::Import) {
            for (const auto& alias : imp->children) {
                auto target = resolver.lookup(file.path, alias.value, 0);
                if (target && target->file) {
                    if (*target->file != file.path)
                        edges[*target->file].aliases.insert(alias.aux.empty() ? alias.value : alias.aux);
                } else if (!target && in_repo(alias.value)) {
                    warn(alias, "unresolved import '" + alias.value + "'");
                }
            }
            continue;
        }
        auto base = resolver.lookup(file.path, imp->value, imp->level);
        if (!base) {
            if (imp->level > 0 || in_repo(imp->value)) warn(*imp, "unresolved import '" + module_display(*imp) + "'");
            continue;
        }
        for (const auto& alias : imp->children) {
            if (alias.value == ImportEdge::kStar) {
                if (base->file) {
                    if (*base->file != file.path) edges[*base->file].names.insert(std::string(ImportEdge::kStar));
                } else {
                    warn(alias, "star import from namespace package '" + module_display(*imp) + "'");
                }
                continue;
            }
            std::string local = alias.aux.empty() ? alias.value : alias.aux;
            if (base->dir) {
                std::string sub_module = imp->value.empty() ? alias.value : imp->value + "." + alias.value;
                auto sub = resolver.lookup(file.path, sub_module, imp->level);
                if (sub && sub->file && parent_dir(*sub->file).rfind(*base->dir, 0) == 0) {
                    if (*sub->file != file.path) edges[*sub->file].aliases.insert(local);
                    continue;
                }
            }
            if (base->file) {
                if (*base->file == file.path) continue;
                std::string entry = alias.value;
                if (!alias.aux.empty()) entry += " as " + alias.aux;
                edges[*base->file].names.insert(entry);
            } else {
                warn(alias, "cannot resolve '" + alias.value + "' in '" + module_display(*imp) + "'");
            }
        }
    }

    std::vector<ImportEdge> out;
    for (auto& [to, acc] : edges) {
        ImportEdge e;
        e.from_file = file.path;
        e.to_file = to;
        e.imported_names.assign(acc.names.begin(), acc.names.end());
        e.module_aliases.assign(acc.aliases.begin(), acc.aliases.end());
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<std::string> default_ignore_globs() {
    return {".venv", "venv", "__pycache__", ".git", ".tox", ".mypy_cache", ".pytest_cache", "site-packages",
            ".eggs", "*.egg-info", "node_modules"};
}

namespace {

bool ignored(const std::string& rel, const std::vector<std::string>& globs) {
    for (const auto& g : globs) {
        if (fnmatch(g.c_str(), rel.c_str(), 0) == 0) return true;
        std::size_t start = 0;
        while (start <= rel.size()) {
            auto slash = rel.find('/', start);
            std::string part = rel.substr(start, slash == std::string::npos ? std::string::npos : slash - start);
            if (fnmatch(g.c_str(), part.c_str(), 0) == 0) return true;
            if (slash == std::string::npos) break;
            start = slash + 1;
        }
    }
    return false;
}

struct FileResult {
    std::vector<CodeUnit> units;
    std::vector<ImportEdge> edges;
    std::vector<Diagnostic> diagnostics;
};

BuildResult assemble(const std::string& repo_root, const std::vector<std::string>& paths,
                     const std::function<std::optional<std::string>(std::size_t, std::vector<Diagnostic>&)>& load,
                     unsigned jobs) {
    std::set<std::string> file_set(paths.begin(), paths.end());
    std::vector<FileResult> results(paths.size());
    parallel_for(paths.size(), jobs, [&](std::size_t i) {
        FileResult& r = results[i];
        auto source = load(i, r.diagnostics);
        if (!source) return;
        ParsedFile parsed = parse_file(paths[i], std::move(*source));
        for (const auto& e : parsed.parse_errors)
            r.diagnostics.push_back({paths[i], e.line, (parsed.fatal ? "fatal syntax error: " : "syntax error: ") + e.message});
        r.units = extract_units(parsed);
        r.edges = extract_imports(parsed, file_set, &r.diagnostics);
    });
    BuildResult out;
    std::vector<CodeUnit> units;
    std::vector<ImportEdge> edges;
    for (auto& r : results) {
        for (auto& u : r.units) units.push_back(std::move(u));
        for (auto& e : r.edges) edges.push_back(std::move(e));
        for (auto& d : r.diagnostics) out.diagnostics.push_back(std::move(d));
    }
    out.graph = CodeGraph(repo_root, paths, std::move(units), std::move(edges));
    return out;
}

}  // namespace

std::vector<std::string> list_source_files(const std::string& repo_root, const ExtractionOptions& options) {
    std::error_code ec;
    if (!fs::is_directory(repo_root, ec)) throw std::runtime_error("not a readable directory: " + repo_root);
    std::vector<std::string> out;
    fs::recursive_directory_iterator it(repo_root, fs::directory_options::skip_permission_denied, ec);
    if (ec) throw std::runtime_error("cannot read directory " + repo_root + ": " + ec.message());
    for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) throw std::runtime_error("cannot walk " + repo_root + ": " + ec.message());
        std::string rel = fs::relative(it->path(), repo_root).generic_string();
        if (ignored(rel, options.ignore_globs)) {
            if (it->is_directory()) it.disable_recursion_pending();
            continue;
        }
        if (it->is_regular_file() && it->path().extension() == ".py") out.push_back(rel);
    }
    std::sort(out.begin(), out.end());
    return out;
}

BuildResult build_graph(const std::string& repo_root, const ExtractionOptions& options) {
    auto paths = list_source_files(repo_root, options);
    std::string root = fs::path(repo_root).lexically_normal().generic_string();
    if (root.size() > 1 && root.back() == '/') root.pop_back();
    return assemble(
        root, paths,
        [&](std::size_t i, std::vector<Diagnostic>& diags) -> std::optional<std::string> {
            try {
                return read_text_file((fs::path(repo_root) / paths[i]).string());
            } catch (const std::exception& e) {
                diags.push_back({paths[i], 0, e.what()});
                return std::nullopt;
            }
        },
        options.jobs);
}

BuildResult build_graph_from_sources(const std::string& repo_root, const std::map<std::string, std::string>& sources,
                                     unsigned jobs) {
    std::vector<std::string> paths;
    std::vector<const std::string*> texts;
    for (const auto& [path, text] : sources) {
        paths.push_back(path);
        texts.push_back(&text);
    }
    return assemble(
        repo_root, paths, [&](std::size_t i, std::vector<Diagnostic>&) { return std::optional<std::string>(*texts[i]); },
        jobs);
}

}  // namespace hydra
