#include "hydra/import_resolver.hpp"

namespace hydra {

std::string parent_dir(std::string_view path) {
    auto slash = path.rfind('/');
    return slash == std::string_view::npos ? std::string() : std::string(path.substr(0, slash));
}

std::string join_path(std::string_view dir, std::string_view name) {
    if (dir.empty()) return std::string(name);
    if (name.empty()) return std::string(dir);
    std::string out(dir);
    out += '/';
    out += name;
    return out;
}

ModuleResolver::ModuleResolver(std::set<std::string> repo_files) : files_(std::move(repo_files)) {
    for (const auto& f : files_) {
        for (std::string d = parent_dir(f); !d.empty(); d = parent_dir(d)) {
            if (!dirs_.insert(d).second) break;
        }
    }
}

bool ModuleResolver::is_dir(const std::string& path) const { return path.empty() || dirs_.count(path) != 0; }

std::vector<std::string> ModuleResolver::bases(std::string_view from_file, int level) const {
    if (level == 0) {
        std::vector<std::string> out = {""};
        std::string own = parent_dir(from_file);
        if (!own.empty()) out.push_back(own);
        if (own != "src") out.push_back("src");
        return out;
    }
    std::string dir = parent_dir(from_file);
    for (int i = 1; i < level; ++i) {
        if (dir.empty()) return {};  // climbs above the repository
        dir = parent_dir(dir);
    }
    return {dir};
}

std::optional<ModuleResolver::Target> ModuleResolver::lookup(std::string_view from_file, std::string_view module,
                                                             int level) const {
    std::string rel;
    for (char c : module) rel.push_back(c == '.' ? '/' : c);
    std::optional<Target> namespace_pkg;
    for (const auto& base : bases(from_file, level)) {
        if (!base.empty() && !is_dir(base)) continue;
        std::string path = join_path(base, rel);
        std::string init = join_path(path, "__init__.py");
        if (files_.count(init)) return Target{init, path};
        if (!rel.empty() && files_.count(path + ".py")) return Target{path + ".py", std::nullopt};
        if (!namespace_pkg && is_dir(path) && (level > 0 || !rel.empty())) namespace_pkg = Target{std::nullopt, path};
    }
    return namespace_pkg;
}

}  // namespace hydra
