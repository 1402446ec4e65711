#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace hydra {

/// Raised when an operation names a file the graph does not index.
class UnindexedPathError : public std::invalid_argument {
public:
    explicit UnindexedPathError(const std::string& path)
        : std::invalid_argument("path is not indexed: " + path) {}
};

enum class UnitKind { Function, Class, Variable };

std::string_view to_string(UnitKind kind);
UnitKind parse_unit_kind(std::string_view text);

/// Location of a unit inside its file. Byte offsets index the raw file bytes;
/// `start_col` is the indentation width of the first line, needed to re-parse
/// a method's text in isolation.
struct SourceSpan {
    std::string file_path;
    int start_line = 0;
    int end_line = 0;
    std::size_t start_byte = 0;
    std::size_t end_byte = 0;
    int start_col = 0;

    bool operator==(const SourceSpan&) const = default;
};

/// One structural node of a repository: a function (or method), a class, or a
/// module-level variable, carrying its complete source text.
struct CodeUnit {
    std::string id;
    UnitKind kind = UnitKind::Function;
    std::string qualified_name;
    std::string signature;
    std::optional<std::string> docstring;
    std::string body_text;
    SourceSpan span;
    std::optional<std::string> parent_class;

    /// Last component of the qualified name ("camel" for "Formatter.camel").
    std::string_view short_name() const;
    bool is_method() const { return kind == UnitKind::Function && parent_class.has_value(); }
    /// Top level = no dot in the qualified name.
    bool is_top_level() const { return qualified_name.find('.') == std::string::npos; }

    bool operator==(const CodeUnit&) const = default;
};

/// Text of a unit as a retrieval document and as a scorer candidate:
/// signature, docstring (when present) and body, newline-separated.
std::string document_text(const CodeUnit& unit);

/// `path::qualified_name::Kind`, optionally with an ordinal suffix on the name
/// when the same file rebinds a name (`C.x#2` for a property setter).
std::string make_unit_id(std::string_view path, std::string_view qualified_name, UnitKind kind,
                         int ordinal = 1);

/// A file-level import connection. `imported_names` holds the names a
/// `from ... import` statement binds (`name`, `name as alias`, or `*`);
/// `module_aliases` holds the local dotted names bound to the whole target
/// module (`import pkg.mod` binds `pkg.mod`, `import mod as m` binds `m`).
struct ImportEdge {
    std::string from_file;
    std::string to_file;
    std::vector<std::string> imported_names;
    std::vector<std::string> module_aliases;

    static constexpr std::string_view kStar = "*";
    bool has_star() const;

    bool operator==(const ImportEdge&) const = default;
};

/// One entry of `imported_names`, split into the source name and local binding.
struct ImportedName {
    std::string name;
    std::string local;
};
ImportedName parse_imported_name(std::string_view entry);

/// The indexed repository. Immutable once constructed; all lookups are const.
class CodeGraph {
public:
    CodeGraph() = default;
    /// Validates referential integrity and id uniqueness; throws std::invalid_argument.
    CodeGraph(std::string repo_root, std::vector<std::string> files, std::vector<CodeUnit> units,
              std::vector<ImportEdge> import_edges);

    const std::string& repo_root() const { return repo_root_; }
    const std::vector<std::string>& files() const { return files_; }
    const std::vector<CodeUnit>& units() const { return units_; }
    const std::vector<ImportEdge>& import_edges() const { return import_edges_; }

    const CodeUnit* lookup(std::string_view id) const;
    bool has_file(std::string_view path) const;

    /// One-hop import targets of `file`. Throws UnindexedPathError.
    std::set<std::string> imported_files(std::string_view file) const;
    std::vector<const ImportEdge*> edges_from(std::string_view file) const;
    /// Units of `file` in source order.
    std::vector<const CodeUnit*> units_in(std::string_view file) const;

    bool operator==(const CodeGraph& other) const;

private:
    void build_lookup();

    std::string repo_root_;
    std::vector<std::string> files_;
    std::vector<CodeUnit> units_;
    std::vector<ImportEdge> import_edges_;

    std::unordered_map<std::string, std::size_t> by_id_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_file_;
    std::unordered_map<std::string, std::vector<std::size_t>> edges_by_file_;
};

// Index file (JSON) serialization.
nlohmann::json to_json(const CodeUnit& unit);
CodeUnit unit_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ImportEdge& edge);
ImportEdge edge_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CodeGraph& graph);
CodeGraph graph_from_json(const nlohmann::json& j);

void save_graph(const CodeGraph& graph, const std::string& path);
CodeGraph load_graph(const std::string& path);

}  // namespace hydra
