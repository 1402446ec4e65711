#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hydra/code_graph.hpp"
#include "hydra/python/ast.hpp"

namespace hydra {

struct Diagnostic {
    std::string file;
    int line = 0;  // 0 when not tied to a line
    std::string message;
};
std::string format_diagnostic(const Diagnostic& d);

struct ParsedFile {
    std::string path;  // repo-relative, '/'-separated
    std::string source;
    python::Node module;
    std::vector<python::ParseError> parse_errors;
    bool fatal = false;
};

ParsedFile parse_file(std::string path, std::string source);

/// Top-level functions, classes (nested ones too), methods and module-level
/// variables, in source order. Statements under top-level if/try/with/for/while
/// blocks count as top level.
std::vector<CodeUnit> extract_units(const ParsedFile& file);

/// Import statements anywhere in the file, resolved against `repo_files`.
/// One edge per target file with names merged and sorted.
std::vector<ImportEdge> extract_imports(const ParsedFile& file, const std::set<std::string>& repo_files,
                                        std::vector<Diagnostic>* diagnostics = nullptr);

std::vector<std::string> default_ignore_globs();

struct ExtractionOptions {
    std::vector<std::string> ignore_globs = default_ignore_globs();
    unsigned jobs = 0;  // 0 = hardware concurrency
};

struct BuildResult {
    CodeGraph graph;
    std::vector<Diagnostic> diagnostics;
};

/// Sorted repo-relative paths of the `.py` files under `repo_root`.
std::vector<std::string> list_source_files(const std::string& repo_root, const ExtractionOptions& options);

/// Throws std::runtime_error when the root is not a readable directory.
BuildResult build_graph(const std::string& repo_root, const ExtractionOptions& options = {});

/// Same pipeline over in-memory sources keyed by repo-relative path.
BuildResult build_graph_from_sources(const std::string& repo_root, const std::map<std::string, std::string>& sources,
                                     unsigned jobs = 1);

}  // namespace hydra
