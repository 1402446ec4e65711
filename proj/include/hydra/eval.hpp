#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hydra/code_graph.hpp"
#include "hydra/dependency_oracle.hpp"

namespace hydra {

/// Precision, recall and F1 of one retrieved set against the true
/// dependencies, with recall per unit kind. A kind with no true dependencies
/// has no recall (nullopt).
struct RetrievalEval {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::optional<double> frecall;
    std::optional<double> crecall;
    std::optional<double> vrecall;
};

/// Throws std::invalid_argument when `gold` is empty. Ids missing from the
/// graph count for the overall figures but for no kind.
RetrievalEval retrieval_eval(const std::set<std::string>& retrieved, const std::set<std::string>& gold,
                             const CodeGraph& graph);

/// Unbiased pass@k, 1 - C(n-c, k) / C(n, k), as a running product. Throws
/// std::invalid_argument unless 0 <= c <= n and 1 <= k <= n.
double pass_at_k(int n, int c, int k);

/// |invoked & gold| / |gold|. Throws std::invalid_argument when gold is empty.
double dependency_invocation_rate(const std::set<std::string>& invoked, const std::set<std::string>& gold);

struct LatencySummary {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double median = 0.0;
};

/// Throws std::invalid_argument on an empty sample.
LatencySummary latency_summary(std::vector<double> samples_ms);

nlohmann::json to_json(const RetrievalEval& e);
nlohmann::json to_json(const LatencySummary& s);

/// One generated sample for a task, with its test outcome from an external runner.
struct Solution {
    std::string anchor_id;
    int sample_index = 0;
    std::string body_text;
    bool passed = false;
};
Solution solution_from_json(const nlohmann::json& j);

/// DIR of one generated function. `parsed` is false when the source did not
/// parse; the rate is then 0.
struct DirResult {
    double rate = 0.0;
    bool parsed = true;
    std::vector<std::string> invoked;
};
DirResult solution_dir(const DependencyOracle& oracle, const CandidateScope& scope, const std::string& source,
                       const std::set<std::string>& gold);

enum class DirAggregate { Mean, Best };
DirAggregate parse_dir_aggregate(const std::string& text);

struct EvalInputs {
    std::vector<std::string> task_ids;
    std::map<std::string, std::set<std::string>> gold;  // per task
    std::map<std::string, std::vector<std::string>> retrieved;  // per task, absent = not evaluated
    std::map<std::string, std::optional<double>> latency_ms;
    std::vector<Solution> solutions;
    std::vector<int> ks = {1};
    DirAggregate dir_aggregate = DirAggregate::Mean;
    unsigned jobs = 1;
};

/// Per-task metrics and their means. Retrieval and DIR figures skip tasks
/// whose gold set is empty; kind recalls average the tasks where they exist.
nlohmann::json evaluate_report(const CodeGraph& graph, const EvalInputs& inputs);

}  // namespace hydra
