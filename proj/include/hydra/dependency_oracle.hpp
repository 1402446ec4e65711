#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "hydra/code_graph.hpp"

namespace hydra {

using KindSet = std::set<UnitKind>;
KindSet all_kinds();
/// Comma-separated, case-insensitive: "function,class,variable".
KindSet parse_kinds(std::string_view text);

/// Signature, plus a newline and the docstring when there is one.
struct Query {
    std::string anchor_id;
    std::string text;

    bool operator==(const Query&) const = default;
};
Query make_query(const CodeUnit& anchor);

struct ScopeOptions {
    KindSet kinds = all_kinds();
    bool include_methods = true;
};

struct CandidateScope {
    std::string anchor_id;
    std::vector<std::string> candidate_ids;
};

/// Units of the requested kinds in the anchor's file and its one-hop imported
/// files: own file first, then imports in path order. Excludes the anchor and
/// the classes enclosing it. Throws std::invalid_argument when the anchor is
/// missing or not a Function.
CandidateScope candidate_scope(const CodeGraph& graph, std::string_view anchor_id, const ScopeOptions& options = {});

/// Static usage analysis of one function against its candidate scope.
///
/// Functions (methods included) count when called, decorators included.
/// Classes and variables count on any load. A call `x.m(...)` matches every
/// in-scope method named `m` unless `x` names an imported module. Names bound
/// locally (parameters, assignments, nested definitions, handlers, pattern
/// captures) shadow module-level units within their scope.
class DependencyOracle {
public:
    explicit DependencyOracle(const CodeGraph& graph);

    /// Candidates of `scope` referenced by the anchor, in scope order.
    std::vector<std::string> analyze(const CandidateScope& scope) const;

    /// Same analysis over replacement source for the anchor (a generated
    /// solution). Returns nullopt when the source does not parse or contains
    /// no function definition.
    std::optional<std::vector<std::string>> analyze_source(const CandidateScope& scope, std::string_view source) const;

    const CodeGraph& graph() const { return graph_; }

    struct FileTable;

private:
    const CodeGraph& graph_;
    std::unordered_map<std::string, std::shared_ptr<const FileTable>> tables_;
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> by_qname_;  // (file, qname) -> ids
};

std::vector<std::string> analyze_dependencies(const CodeGraph& graph, std::string_view anchor_id,
                                              const CandidateScope& scope);

struct Triplet {
    Query query;
    std::vector<std::string> positives;
    std::vector<std::string> negatives;

    bool operator==(const Triplet&) const = default;
};

nlohmann::json to_json(const Triplet& t);
Triplet triplet_from_json(const nlohmann::json& j);

/// One triplet per Function unit with a non-empty scope, in graph order.
std::vector<Triplet> build_triplets(const CodeGraph& graph, const ScopeOptions& options = {}, unsigned jobs = 1);

}  // namespace hydra
