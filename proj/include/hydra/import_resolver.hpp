#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hydra {

/// Maps Python module names to repository files. Absolute imports are looked
/// up under the repo root, the importing file's directory and `src/`, in that
/// order; relative imports are anchored at the importing file's package.
class ModuleResolver {
public:
    struct Target {
        std::optional<std::string> file;  // module file or package __init__.py
        std::optional<std::string> dir;   // package directory, when a package
    };

    explicit ModuleResolver(std::set<std::string> repo_files);

    /// `module` may be empty for `from . import x`.
    std::optional<Target> lookup(std::string_view from_file, std::string_view module, int level) const;

    bool has_file(const std::string& path) const { return files_.count(path) != 0; }

private:
    std::vector<std::string> bases(std::string_view from_file, int level) const;
    bool is_dir(const std::string& path) const;

    std::set<std::string> files_;
    std::set<std::string> dirs_;
};

/// Repo-relative directory of a path ("" for a top-level file).
std::string parent_dir(std::string_view path);
std::string join_path(std::string_view dir, std::string_view name);

}  // namespace hydra
