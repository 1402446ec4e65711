#pragma once

#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hydra/code_graph.hpp"
#include "hydra/extractor.hpp"
#include "hydra/jsonl.hpp"

namespace hydra::testkit {

inline std::string fixture_dir(const std::string& name) { return std::string(HYDRA_FIXTURES_DIR) + "/" + name; }

inline const std::vector<std::string>& labeled_fixtures() {
    static const std::vector<std::string> names = {"minirepo", "pkgrepo", "starrepo", "classrepo", "varrepo"};
    return names;
}

inline CodeGraph load_fixture(const std::string& name) {
    ExtractionOptions opts;
    opts.jobs = 1;
    return build_graph(fixture_dir(name), opts).graph;
}

/// anchor id -> hand-labeled dependency ids
inline std::map<std::string, std::set<std::string>> fixture_labels(const std::string& name) {
    auto j = nlohmann::json::parse(read_text_file(fixture_dir(name + ".labels.json")));
    std::map<std::string, std::set<std::string>> out;
    for (auto& [anchor, deps] : j.items()) {
        auto v = deps.get<std::vector<std::string>>();
        out[anchor] = std::set<std::string>(v.begin(), v.end());
    }
    return out;
}

/// Fresh directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("hydra-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

    void write(const std::string& rel, const std::string& content) const {
        auto p = path_ / rel;
        std::filesystem::create_directories(p.parent_path());
        write_text_file(p.string(), content);
    }

private:
    std::filesystem::path path_;
};

}  // namespace hydra::testkit
