#include "hydra/dar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace hydra {

void DarConfig::validate() const {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw std::invalid_argument("threshold must be in [0, 1]");
    if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
}

std::string pair_request_id(std::string_view anchor_id, std::string_view candidate_id) {
    std::string id(anchor_id);
    id += '|';
    id += candidate_id;
    return id;
}

std::vector<ScoredCandidate> score_candidates(const Query& query, const CandidateScope& scope, const CodeGraph& graph,
                                              Scorer& scorer, std::size_t batch_size) {
    if (scope.anchor_id != query.anchor_id)
        throw std::invalid_argument("scope anchor " + scope.anchor_id + " does not match query " + query.anchor_id);
    if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
    std::vector<ScoredCandidate> out;
    out.reserve(scope.candidate_ids.size());
    for (std::size_t start = 0; start < scope.candidate_ids.size(); start += batch_size) {
        const std::size_t end = std::min(scope.candidate_ids.size(), start + batch_size);
        std::vector<ScoreRequest> batch;
        batch.reserve(end - start);
        for (std::size_t i = start; i < end; ++i) {
            const auto& id = scope.candidate_ids[i];
            const CodeUnit* unit = graph.lookup(id);
            if (!unit) throw std::invalid_argument("candidate not in graph: " + id);
            batch.push_back({pair_request_id(query.anchor_id, id), query.text, document_text(*unit), query.anchor_id, id});
        }
        std::vector<double> probs;
        try {
            probs = scorer.score_batch(batch);
            if (probs.size() != batch.size())
                throw ScorerError("returned " + std::to_string(probs.size()) + " probabilities for " +
                                  std::to_string(batch.size()) + " requests");
        } catch (const std::exception& e) {
            throw ScorerError("scoring " + query.anchor_id + " candidates " + std::to_string(start) + ".." +
                              std::to_string(end - 1) + " (" + scope.candidate_ids[start] + " ...): " + e.what());
        }
        for (std::size_t i = start; i < end; ++i) {
            double p = probs[i - start];
            if (!(p >= 0.0 && p <= 1.0))
                throw ScorerError("probability out of [0, 1] for " + scope.candidate_ids[i]);
            out.push_back({scope.candidate_ids[i], p});
        }
    }
    return out;
}

std::vector<std::string> filter_by_threshold(const std::vector<ScoredCandidate>& candidates, double threshold) {
    std::vector<std::string> out;
    for (const auto& c : candidates) {
        if (c.probability > threshold) out.push_back(c.unit_id);
    }
    return out;
}

std::vector<ScoredCandidate> dar_score(const CodeGraph& graph, const Query& query, const DarConfig& config,
                                       Scorer& scorer) {
    config.validate();
    auto scope = candidate_scope(graph, query.anchor_id, config.scope);
    return score_candidates(query, scope, graph, scorer, config.batch_size);
}

std::vector<std::string> dar_retrieve(const CodeGraph& graph, const Query& query, const DarConfig& config,
                                      Scorer& scorer) {
    return filter_by_threshold(dar_score(graph, query, config, scorer), config.threshold);
}

double compute_alpha(std::size_t n_pos, std::size_t n_neg) {
    if (n_pos == 0) throw std::invalid_argument("alpha needs at least one positive example");
    return 1.0 / static_cast<double>((n_pos + n_neg) / n_pos);
}

double brp(double recall_1, double recall_0, double alpha) {
    const double gap = recall_1 - recall_0;
    return recall_1 - alpha * gap * gap;
}

ThresholdChoice tune_threshold(const std::vector<LabeledScore>& scored, const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("threshold grid is empty");
    std::size_t n_pos = 0, n_neg = 0;
    for (const auto& s : scored) {
        if (s.label == 1)
            ++n_pos;
        else if (s.label == 0)
            ++n_neg;
        else
            throw std::invalid_argument("labels must be 0 or 1");
    }
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("threshold tuning needs both classes; got " + std::to_string(n_pos) +
                                    " positive and " + std::to_string(n_neg) + " negative pairs");
    const double alpha = compute_alpha(n_pos, n_neg);

    ThresholdChoice choice;
    const BrpPoint* best = nullptr;
    for (double t : grid) {
        std::size_t tp = 0, tn = 0;
        for (const auto& s : scored) {
            const bool predicted = s.probability > t;
            if (s.label == 1 && predicted) ++tp;
            if (s.label == 0 && !predicted) ++tn;
        }
        BrpPoint p;
        p.threshold = t;
        p.recall_1 = static_cast<double>(tp) / static_cast<double>(n_pos);
        p.recall_0 = static_cast<double>(tn) / static_cast<double>(n_neg);
        p.alpha = alpha;
        p.brp = brp(p.recall_1, p.recall_0, alpha);
        choice.points.push_back(p);
    }
    for (const auto& p : choice.points) {
        if (!best || p.brp > best->brp || (p.brp == best->brp && p.threshold < best->threshold)) best = &p;
    }
    choice.threshold = best->threshold;
    return choice;
}

namespace {

double parse_number(std::string_view text, std::string_view spec) {
    std::string s(text);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || !std::isfinite(v))
        throw std::invalid_argument("bad grid \"" + std::string(spec) + "\": expected start:stop:step");
    return v;
}

}  // namespace

std::vector<double> parse_grid(std::string_view spec) {
    auto c1 = spec.find(':');
    auto c2 = c1 == std::string_view::npos ? c1 : spec.find(':', c1 + 1);
    if (c2 == std::string_view::npos || spec.find(':', c2 + 1) != std::string_view::npos)
        throw std::invalid_argument("bad grid \"" + std::string(spec) + "\": expected start:stop:step");
    const double start = parse_number(spec.substr(0, c1), spec);
    const double stop = parse_number(spec.substr(c1 + 1, c2 - c1 - 1), spec);
    const double step = parse_number(spec.substr(c2 + 1), spec);
    if (step <= 0.0 || stop < start) throw std::invalid_argument("bad grid \"" + std::string(spec) + "\": empty range");
    std::vector<double> out;
    for (std::size_t i = 0;; ++i) {
        double v = std::round((start + static_cast<double>(i) * step) * 1e10) / 1e10;
        if (v > stop + 1e-9) break;
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("grid thresholds must lie in [0, 1]");
        out.push_back(v);
    }
    return out;
}

std::vector<double> default_grid() { return parse_grid("0.15:0.5:0.05"); }

nlohmann::json to_json(const BrpPoint& p) {
    return {{"threshold", p.threshold}, {"recall_1", p.recall_1}, {"recall_0", p.recall_0}, {"alpha", p.alpha},
            {"brp", p.brp}};
}

nlohmann::json to_json(const ThresholdChoice& choice) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : choice.points) points.push_back(to_json(p));
    return {{"best_threshold", choice.threshold}, {"points", points}};
}

}  // namespace hydra
