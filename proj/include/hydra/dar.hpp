#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hydra/code_graph.hpp"
#include "hydra/dependency_oracle.hpp"
#include "hydra/scorer.hpp"

namespace hydra {

struct ScoredCandidate {
    std::string unit_id;
    double probability = 0.0;

    bool operator==(const ScoredCandidate&) const = default;
};

struct DarConfig {
    double threshold = 0.25;
    ScopeOptions scope;
    std::size_t batch_size = 64;

    /// Throws std::invalid_argument unless 0 <= threshold <= 1 and batch_size > 0.
    void validate() const;
};

/// Wire id of a pair: "<anchor_id>|<candidate_id>".
std::string pair_request_id(std::string_view anchor_id, std::string_view candidate_id);

/// One probability per scope candidate, in scope order. Scorer failures are
/// rethrown as ScorerError naming the failing batch.
std::vector<ScoredCandidate> score_candidates(const Query& query, const CandidateScope& scope, const CodeGraph& graph,
                                              Scorer& scorer, std::size_t batch_size = 64);

/// Ids with probability strictly above `threshold`, in input order.
std::vector<std::string> filter_by_threshold(const std::vector<ScoredCandidate>& candidates, double threshold);

/// Scope, scoring and filtering for one anchor.
std::vector<ScoredCandidate> dar_score(const CodeGraph& graph, const Query& query, const DarConfig& config,
                                       Scorer& scorer);
std::vector<std::string> dar_retrieve(const CodeGraph& graph, const Query& query, const DarConfig& config,
                                      Scorer& scorer);

/// 1 / floor((n_pos + n_neg) / n_pos). Throws std::invalid_argument when n_pos is 0.
double compute_alpha(std::size_t n_pos, std::size_t n_neg);

/// recall_1 - alpha * (recall_1 - recall_0)^2
double brp(double recall_1, double recall_0, double alpha);

struct BrpPoint {
    double threshold = 0.0;
    double recall_1 = 0.0;
    double recall_0 = 0.0;
    double alpha = 0.0;
    double brp = 0.0;
};

struct LabeledScore {
    double probability = 0.0;
    int label = 0;
};

struct ThresholdChoice {
    double threshold = 0.0;
    std::vector<BrpPoint> points;  // grid order
};

/// Grid search for the threshold with the highest BRP; ties go to the smaller
/// threshold. Throws std::invalid_argument on an empty grid or when the labels
/// contain only one class.
ThresholdChoice tune_threshold(const std::vector<LabeledScore>& scored, const std::vector<double>& grid);

/// "start:stop:step", stop inclusive. Values are rounded to 10 decimals so
/// 0.15:0.5:0.05 yields 0.3 rather than 0.30000000000000004.
std::vector<double> parse_grid(std::string_view spec);
std::vector<double> default_grid();

nlohmann::json to_json(const BrpPoint& p);
nlohmann::json to_json(const ThresholdChoice& choice);

}  // namespace hydra
