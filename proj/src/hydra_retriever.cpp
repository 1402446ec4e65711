#include "hydra/hydra_retriever.hpp"

#include <chrono>
#include <set>
#include <stdexcept>

#include "hydra/python/parser.hpp"
#include "hydra/text_tokenizer.hpp"

namespace hydra {

Bm25Index build_unit_index(const CodeGraph& graph) {
    std::vector<std::string> ids;
    std::vector<std::string> texts;
    ids.reserve(graph.units().size());
    texts.reserve(graph.units().size());
    for (const auto& u : graph.units()) {
        ids.push_back(u.id);
        texts.push_back(document_text(u));
    }
    return Bm25Index::from_texts(std::move(ids), texts);
}

namespace {

std::set<std::string> anchor_and_ancestors(const CodeGraph& graph, const std::string& anchor_id) {
    std::set<std::string> out = {anchor_id};
    const CodeUnit* u = graph.lookup(anchor_id);
    while (u && u->parent_class) {
        out.insert(*u->parent_class);
        u = graph.lookup(*u->parent_class);
    }
    return out;
}

}  // namespace

std::vector<RankedHit> unit_bm25_topk(const CodeGraph& graph, const Bm25Index& unit_index, const Query& query,
                                      const Bm25Params& params, std::size_t k) {
    std::vector<std::uint32_t> skipped;
    for (const auto& id : anchor_and_ancestors(graph, query.anchor_id)) {
        try {
            skipped.push_back(unit_index.doc_index(id));
        } catch (const std::out_of_range&) {
        }
    }
    auto skip = [&](std::uint32_t doc) {
        for (auto s : skipped)
            if (s == doc) return true;
        return false;
    };
    return unit_index.topk(params, tokenize_code(query.text), k, skip);
}

RetrievedContext hydra_retrieve(const CodeGraph& graph, const Bm25Index& unit_index, const Query& query,
                                const HydraConfig& config, Scorer& scorer) {
    config.bm25.validate();
    config.dar.validate();
    RetrievedContext ctx;
    ctx.anchor_id = query.anchor_id;

    const auto start = std::chrono::steady_clock::now();
    ctx.dependency_units = dar_retrieve(graph, query, config.dar, scorer);
    auto hits = unit_bm25_topk(graph, unit_index, query, config.bm25, config.k_sim);
    const auto stop = std::chrono::steady_clock::now();

    const std::set<std::string> deps(ctx.dependency_units.begin(), ctx.dependency_units.end());
    for (auto& h : hits) {
        if (deps.count(h.doc_id)) continue;
        h.rank = static_cast<int>(ctx.exemplar_hits.size()) + 1;
        ctx.exemplar_hits.push_back(std::move(h));
    }
    ctx.retrieval_latency_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    return ctx;
}

namespace {

std::string unit_source(const CodeUnit& u) {
    if (u.span.start_col == 0) return u.body_text;
    return python::dedent(std::string(static_cast<std::size_t>(u.span.start_col), ' ') + u.body_text);
}

bool has_rendered_ancestor(const CodeGraph& graph, const CodeUnit& u, const std::set<std::string>& rendered) {
    for (const CodeUnit* p = &u; p->parent_class;) {
        if (rendered.count(*p->parent_class)) return true;
        p = graph.lookup(*p->parent_class);
        if (!p) break;
    }
    return false;
}

std::string layout(const CodeGraph& graph, const std::vector<const CodeUnit*>& deps,
                   const std::vector<const CodeUnit*>& exemplars, const std::string& task) {
    std::set<std::string> rendered;
    for (const auto* u : deps) rendered.insert(u->id);
    for (const auto* u : exemplars) rendered.insert(u->id);

    auto section = [&](const char* title, const std::vector<const CodeUnit*>& units) {
        std::string out;
        for (const auto* u : units) {
            if (has_rendered_ancestor(graph, *u, rendered)) continue;
            out += out.empty() ? "" : "\n";
            out += "# file: " + u->span.file_path + "\n" + unit_source(*u);
            if (out.back() != '\n') out += '\n';
        }
        return out.empty() ? out : std::string("# ") + title + "\n\n" + out;
    };

    std::string prompt;
    for (auto part : {section("Dependencies", deps), section("Similar code", exemplars)}) {
        if (part.empty()) continue;
        prompt += part;
        prompt += '\n';
    }
    prompt += task;
    return prompt;
}

}  // namespace

std::string render_prompt(const RetrievedContext& context, const CodeGraph& graph, std::size_t budget) {
    if (budget == 0) throw std::invalid_argument("prompt budget must be positive");
    const CodeUnit* anchor = graph.lookup(context.anchor_id);
    if (!anchor) throw std::invalid_argument("unknown anchor: " + context.anchor_id);
    const std::string task = make_query(*anchor).text;
    if (task.size() > budget)
        throw std::invalid_argument("prompt budget " + std::to_string(budget) + " is smaller than the task (" +
                                    std::to_string(task.size()) + " characters)");

    auto resolve = [&](const std::string& id) {
        const CodeUnit* u = graph.lookup(id);
        if (!u) throw std::invalid_argument("context refers to unknown unit: " + id);
        return u;
    };
    std::vector<const CodeUnit*> deps;
    std::set<std::string> seen;
    for (const auto& id : context.dependency_units) {
        if (seen.insert(id).second) deps.push_back(resolve(id));
    }
    std::vector<const CodeUnit*> exemplars;
    for (const auto& h : context.exemplar_hits) {
        if (seen.insert(h.doc_id).second) exemplars.push_back(resolve(h.doc_id));
    }

    std::string prompt = layout(graph, deps, exemplars, task);
    while (prompt.size() > budget) {
        if (!exemplars.empty())
            exemplars.pop_back();
        else
            deps.pop_back();
        prompt = layout(graph, deps, exemplars, task);
    }
    return prompt;
}

nlohmann::json to_json(const RankedHit& hit) {
    return {{"doc_id", hit.doc_id}, {"score", hit.score}, {"rank", hit.rank}};
}

RankedHit hit_from_json(const nlohmann::json& j) {
    return {j.at("doc_id").get<std::string>(), j.at("score").get<double>(), j.at("rank").get<int>()};
}

nlohmann::json to_json(const RetrievedContext& context) {
    nlohmann::json hits = nlohmann::json::array();
    for (const auto& h : context.exemplar_hits) hits.push_back(to_json(h));
    return {{"anchor_id", context.anchor_id},
            {"dependency_units", context.dependency_units},
            {"exemplar_hits", hits},
            {"rendered_prompt", context.rendered_prompt},
            {"retrieval_latency_ms",
             context.retrieval_latency_ms ? nlohmann::json(*context.retrieval_latency_ms) : nlohmann::json(nullptr)}};
}

RetrievedContext context_from_json(const nlohmann::json& j) {
    RetrievedContext c;
    c.anchor_id = j.at("anchor_id").get<std::string>();
    if (j.contains("dependency_units")) c.dependency_units = j.at("dependency_units").get<std::vector<std::string>>();
    if (j.contains("exemplar_hits")) {
        for (const auto& h : j.at("exemplar_hits")) c.exemplar_hits.push_back(hit_from_json(h));
    }
    c.rendered_prompt = j.value("rendered_prompt", "");
    if (j.contains("retrieval_latency_ms") && !j.at("retrieval_latency_ms").is_null())
        c.retrieval_latency_ms = j.at("retrieval_latency_ms").get<double>();
    return c;
}

}  // namespace hydra
