#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hydra/bm25.hpp"
#include "hydra/code_graph.hpp"
#include "hydra/dar.hpp"

namespace hydra {

/// BM25 index over every unit of the graph, documents from document_text.
Bm25Index build_unit_index(const CodeGraph& graph);

struct RetrievedContext {
    std::string anchor_id;
    std::vector<std::string> dependency_units;
    std::vector<RankedHit> exemplar_hits;
    std::string rendered_prompt;
    std::optional<double> retrieval_latency_ms;
};

struct HydraConfig {
    DarConfig dar;
    Bm25Params bm25;
    std::size_t k_sim = 5;
};

/// DAR dependencies plus BM25 exemplars for one query. The anchor and the
/// classes enclosing it are never ranked; exemplars already present as
/// dependencies are dropped and the remaining hits re-ranked. Latency covers
/// both retrieval paths, not prompt rendering.
RetrievedContext hydra_retrieve(const CodeGraph& graph, const Bm25Index& unit_index, const Query& query,
                                const HydraConfig& config, Scorer& scorer);

/// BM25 top-k for an anchor's query over the unit index, skipping the anchor
/// and its enclosing classes.
std::vector<RankedHit> unit_bm25_topk(const CodeGraph& graph, const Bm25Index& unit_index, const Query& query,
                                      const Bm25Params& params, std::size_t k);

/// Prompt layout:
///
///     # Dependencies
///
///     # file: utils.py
///     <unit source>
///
///     # Similar code
///
///     # file: ...
///     <unit source>
///
///     <task: signature and docstring>
///
/// Empty sections are left out. A method is not emitted when its class is.
/// When the result exceeds `budget` characters, exemplars are dropped from the
/// lowest rank upward, then dependencies from the end; units are never cut.
/// Throws std::invalid_argument when the task alone exceeds the budget.
std::string render_prompt(const RetrievedContext& context, const CodeGraph& graph, std::size_t budget);

nlohmann::json to_json(const RankedHit& hit);
RankedHit hit_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RetrievedContext& context);
RetrievedContext context_from_json(const nlohmann::json& j);

}  // namespace hydra
