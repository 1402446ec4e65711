#include "hydra/cli.hpp"

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "hydra/chunker.hpp"
#include "hydra/code_graph.hpp"
#include "hydra/dar.hpp"
#include "hydra/dataset.hpp"
#include "hydra/dense.hpp"
#include "hydra/eval.hpp"
#include "hydra/extractor.hpp"
#include "hydra/hydra_retriever.hpp"
#include "hydra/jsonl.hpp"
#include "hydra/kernels.hpp"
#include "hydra/parallel.hpp"
#include "hydra/scorer.hpp"
#include "hydra/text_tokenizer.hpp"

namespace hydra::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Global {
    unsigned jobs = 0;
    std::uint64_t seed = 0;
};

std::string dump_line(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace) + "\n"; }
std::string dump_doc(const json& j) { return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n"; }

void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        out.flush();
    } else {
        write_text_file(path, content);
    }
}

json read_json_file(const std::string& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": invalid JSON: " + e.what());
    }
}

// ---- scorers

struct ScorerSpec {
    std::string kind = "heuristic";
    std::string command;
    std::size_t batch_size = 64;
};

void add_scorer_options(CLI::App* cmd, ScorerSpec& s) {
    cmd->add_option("--scorer", s.kind, "Pair scorer: heuristic, oracle, random or cmd")
        ->check(CLI::IsMember({"heuristic", "oracle", "random", "cmd"}));
    cmd->add_option("--scorer-cmd", s.command, "Scorer command (JSON Lines over stdin/stdout); implies --scorer cmd");
    cmd->add_option("--batch-size", s.batch_size, "Pairs per scorer batch")->check(CLI::PositiveNumber);
}

std::unique_ptr<Scorer> make_scorer(const ScorerSpec& spec, const CodeGraph& graph, std::uint64_t seed) {
    std::string kind = spec.command.empty() ? spec.kind : "cmd";
    if (kind == "heuristic") return std::make_unique<HeuristicScorer>(graph);
    if (kind == "oracle") return std::make_unique<OracleScorer>(graph);
    if (kind == "random") return std::make_unique<RandomScorer>(seed);
    if (spec.command.empty()) throw std::invalid_argument("--scorer cmd needs --scorer-cmd");
    return std::make_unique<SubprocessScorer>(SubprocessScorer::Options{spec.command, SubprocessScorer::default_timeout_ms()});
}

// ---- index

struct IndexArgs {
    std::string repo;
    std::string out;
    std::string mode = "units";
    std::size_t chunk_size = 2048;
    double overlap = 0.5;
    std::vector<std::string> ignore;
    bool no_default_ignores = false;
};

int cmd_index(const IndexArgs& a, const Global& g, std::ostream& out, std::ostream& err) {
    ExtractionOptions opts;
    if (a.no_default_ignores) opts.ignore_globs.clear();
    opts.ignore_globs.insert(opts.ignore_globs.end(), a.ignore.begin(), a.ignore.end());
    opts.jobs = g.jobs;
    if (a.mode == "chunks") {
        auto index = build_chunk_index(a.repo, {a.chunk_size, a.overlap}, opts);
        err << "hydra: indexed " << index.files.size() << " files into " << index.chunks.size() << " chunks\n";
        emit(a.out, to_json(index).dump(1, ' ', false, json::error_handler_t::replace) + "\n", out);
        return kOk;
    }
    auto result = build_graph(a.repo, opts);
    for (const auto& d : result.diagnostics) err << "hydra: warning: " << format_diagnostic(d) << "\n";
    const auto& graph = result.graph;
    err << "hydra: indexed " << graph.files().size() << " files, " << graph.units().size() << " units, "
        << graph.import_edges().size() << " import edges\n";
    if (a.out.empty() || a.out == "-")
        out << to_json(graph).dump(1, ' ', false, json::error_handler_t::replace) << "\n";
    else
        save_graph(graph, a.out);
    return kOk;
}

// ---- build-dataset

struct DatasetArgs {
    std::string index;
    std::string out;
    std::string split_dir;
    std::string kinds = "function,class,variable";
    bool exclude_methods = false;
};

std::string pairs_jsonl(const std::vector<Pair>& pairs) {
    std::string s;
    for (const auto& p : pairs) s += dump_line(to_json(p));
    return s;
}

std::string triplets_jsonl(const std::vector<Triplet>& ts) {
    std::string s;
    for (const auto& t : ts) s += dump_line(to_json(t));
    return s;
}

int cmd_build_dataset(const DatasetArgs& a, const Global& g, std::ostream& out, std::ostream& err) {
    auto graph = load_graph(a.index);
    ScopeOptions scope{parse_kinds(a.kinds), !a.exclude_methods};
    auto triplets = build_triplets(graph, scope, g.jobs);
    std::size_t pos = 0, neg = 0;
    for (const auto& t : triplets) {
        pos += t.positives.size();
        neg += t.negatives.size();
    }
    err << "hydra: " << triplets.size() << " triplets, " << pos << " positive and " << neg << " negative pairs\n";
    emit(a.out, triplets_jsonl(triplets), out);
    if (!a.split_dir.empty()) {
        fs::create_directories(a.split_dir);
        auto split = split_and_balance(triplets, g.seed);
        const fs::path dir(a.split_dir);
        write_text_file((dir / "train.jsonl").string(), triplets_jsonl(split.train));
        write_text_file((dir / "validation.jsonl").string(), triplets_jsonl(split.validation));
        write_text_file((dir / "test.jsonl").string(), triplets_jsonl(split.test));
        write_text_file((dir / "train_pairs.jsonl").string(), pairs_jsonl(split.train_pairs));
        write_text_file((dir / "validation_pairs.jsonl").string(), pairs_jsonl(split.validation_pairs));
        write_text_file((dir / "test_pairs.jsonl").string(), pairs_jsonl(split.test_pairs));
        write_text_file((dir / "stats.json").string(), dump_doc(split_stats(split)));
    }
    return kOk;
}

// ---- score-pairs

struct ScorePairsArgs {
    std::string index;
    std::string pairs;
    std::string out;
    ScorerSpec scorer;
};

int cmd_score_pairs(const ScorePairsArgs& a, const Global& g, std::ostream& out, std::ostream&) {
    auto graph = load_graph(a.index);
    std::vector<Pair> pairs;
    for (const auto& rec : read_jsonl(a.pairs)) pairs.push_back(pair_from_json(rec));
    auto scorer = make_scorer(a.scorer, graph, g.seed);

    std::map<std::string, Query> queries;
    std::vector<ScoreRequest> requests;
    for (const auto& p : pairs) {
        auto it = queries.find(p.anchor_id);
        if (it == queries.end()) {
            const CodeUnit* anchor = graph.lookup(p.anchor_id);
            if (!anchor) throw std::runtime_error("unknown anchor in pairs: " + p.anchor_id);
            it = queries.emplace(p.anchor_id, make_query(*anchor)).first;
        }
        const CodeUnit* cand = graph.lookup(p.candidate_id);
        if (!cand) throw std::runtime_error("unknown candidate in pairs: " + p.candidate_id);
        requests.push_back({pair_request_id(p.anchor_id, p.candidate_id), it->second.text, document_text(*cand),
                            p.anchor_id, p.candidate_id});
    }

    std::string text;
    const std::size_t bs = a.scorer.batch_size;
    for (std::size_t start = 0; start < requests.size(); start += bs) {
        std::vector<ScoreRequest> batch(requests.begin() + static_cast<std::ptrdiff_t>(start),
                                        requests.begin() + static_cast<std::ptrdiff_t>(std::min(requests.size(), start + bs)));
        std::vector<double> probs;
        try {
            probs = scorer->score_batch(batch);
        } catch (const std::exception& e) {
            throw ScorerError("scoring pairs " + std::to_string(start) + ".." +
                              std::to_string(start + batch.size() - 1) + ": " + e.what());
        }
        for (std::size_t i = 0; i < batch.size(); ++i) {
            json rec = to_json(pairs[start + i]);
            rec["probability"] = probs[i];
            text += dump_line(rec);
        }
    }
    emit(a.out, text, out);
    return kOk;
}

// ---- tune-threshold

struct TuneArgs {
    std::string scored;
    std::string grid = "0.15:0.5:0.05";
    std::string out;
};

int cmd_tune(const TuneArgs& a, const Global&, std::ostream& out, std::ostream& err) {
    std::vector<LabeledScore> scored;
    std::size_t pos = 0;
    for (const auto& rec : read_jsonl(a.scored)) {
        if (!rec.contains("probability") || !rec.contains("label"))
            throw std::runtime_error(a.scored + ": record without probability and label (run score-pairs first)");
        LabeledScore s{rec.at("probability").get<double>(), rec.at("label").get<int>()};
        pos += s.label == 1;
        scored.push_back(s);
    }
    auto choice = tune_threshold(scored, parse_grid(a.grid));
    json report = to_json(choice);
    report["positives"] = pos;
    report["negatives"] = scored.size() - pos;
    err << "hydra: best threshold " << choice.threshold << "\n";
    emit(a.out, dump_doc(report), out);
    return kOk;
}

// ---- retrieve / bench

struct RetrieveArgs {
    std::string mode = "hydra";
    std::string index;
    std::string graph;  // unit index for chunk mode anchors
    std::string tasks;
    std::string query_file;
    std::string out;
    std::size_t k = 5;
    double threshold = 0.25;
    std::string kinds = "function,class,variable";
    bool exclude_methods = false;
    ScorerSpec scorer;
    std::size_t budget = 12000;
    double k1 = 1.5;
    double b = 0.75;
    std::string embeddings;
    std::string query_embeddings;
    std::string query_source = "task";
    bool no_latency = false;
    std::size_t repeat = 1;
};

void add_retrieve_options(CLI::App* cmd, RetrieveArgs& a) {
    cmd->add_option("--mode", a.mode, "hydra, dar, bm25, dense or chunks")
        ->check(CLI::IsMember({"hydra", "dar", "bm25", "dense", "chunks"}));
    cmd->add_option("--index", a.index, "Unit index (chunk index in chunks mode)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--graph", a.graph, "Unit index used to resolve anchors in chunks mode")->check(CLI::ExistingFile);
    cmd->add_option("--tasks", a.tasks, "JSON Lines with anchor_id (or query.anchor_id) per task")
        ->check(CLI::ExistingFile);
    cmd->add_option("--query-file", a.query_file, "JSON Lines {id, text} free-text queries (bm25 and chunks)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--k", a.k, "Similarity hits per query")->check(CLI::PositiveNumber);
    cmd->add_option("--threshold", a.threshold, "DAR probability threshold")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--kinds", a.kinds, "Candidate kinds for DAR");
    cmd->add_flag("--exclude-methods", a.exclude_methods, "Leave methods out of the DAR scope");
    add_scorer_options(cmd, a.scorer);
    cmd->add_option("--budget", a.budget, "Prompt budget in characters")->check(CLI::PositiveNumber);
    cmd->add_option("--k1", a.k1, "BM25 k1");
    cmd->add_option("--b", a.b, "BM25 b");
    cmd->add_option("--embeddings", a.embeddings, "Document vectors, JSON Lines {doc_id, vector}")
        ->check(CLI::ExistingFile);
    cmd->add_option("--query-embeddings", a.query_embeddings, "Query vectors keyed by task id")
        ->check(CLI::ExistingFile);
    cmd->add_option("--query-source", a.query_source,
                    "task: signature and docstring; prefix: file text before the anchor, then the task")
        ->check(CLI::IsMember({"task", "prefix"}));
}

struct Task {
    std::string id;
    bool anchored = false;
    std::optional<std::string> text;
};

std::vector<Task> load_tasks(const RetrieveArgs& a) {
    if (a.tasks.empty() == a.query_file.empty()) throw std::invalid_argument("give exactly one of --tasks and --query-file");
    std::vector<Task> out;
    if (!a.tasks.empty()) {
        for (const auto& rec : read_jsonl(a.tasks)) {
            Task t;
            t.anchored = true;
            if (rec.contains("anchor_id"))
                t.id = rec.at("anchor_id").get<std::string>();
            else if (rec.contains("query") && rec.at("query").contains("anchor_id"))
                t.id = rec.at("query").at("anchor_id").get<std::string>();
            else
                throw std::runtime_error(a.tasks + ": task record has no anchor_id");
            out.push_back(std::move(t));
        }
    } else {
        for (const auto& rec : read_jsonl(a.query_file)) {
            Task t;
            t.id = rec.at("id").get<std::string>();
            t.text = rec.at("text").get<std::string>();
            out.push_back(std::move(t));
        }
    }
    return out;
}

/// Everything a retrieval run needs, loaded once and shared read-only.
struct Corpus {
    std::optional<CodeGraph> graph;
    std::optional<ChunkIndex> chunks;
    Bm25Index bm25;
    EmbeddingTable doc_vectors;
    EmbeddingTable query_vectors;
};

Corpus load_corpus(const RetrieveArgs& a, bool anchored) {
    Corpus c;
    if (a.mode == "chunks") {
        c.chunks = chunk_index_from_json(read_json_file(a.index));
        if (!a.graph.empty()) c.graph = load_graph(a.graph);
        if (anchored && !c.graph) throw std::invalid_argument("chunks mode with --tasks needs --graph");
        std::vector<std::string> ids, texts;
        for (const auto& ch : c.chunks->chunks) {
            ids.push_back(ch.id());
            texts.push_back(ch.text);
        }
        c.bm25 = Bm25Index::from_texts(std::move(ids), texts);
        return c;
    }
    c.graph = load_graph(a.index);
    if (a.mode == "dense") {
        if (a.embeddings.empty() || a.query_embeddings.empty())
            throw std::invalid_argument("dense mode needs --embeddings and --query-embeddings");
        c.doc_vectors = read_embeddings(a.embeddings);
        c.query_vectors = read_embeddings(a.query_embeddings);
    } else if (a.mode == "hydra" || a.mode == "bm25") {
        c.bm25 = build_unit_index(*c.graph);
    }
    if ((a.mode == "hydra" || a.mode == "dar") && !anchored)
        throw std::invalid_argument(a.mode + " mode needs --tasks with anchors");
    return c;
}

std::set<std::string> excluded_units(const CodeGraph& graph, const std::string& anchor_id) {
    std::set<std::string> out = {anchor_id};
    for (const CodeUnit* u = graph.lookup(anchor_id); u && u->parent_class; u = graph.lookup(*u->parent_class))
        out.insert(*u->parent_class);
    return out;
}

Query task_query(const RetrieveArgs& a, const Corpus& c, const Task& t) {
    if (!t.anchored) return Query{t.id, *t.text};
    const CodeUnit* anchor = c.graph->lookup(t.id);
    if (!anchor) throw std::runtime_error("unknown anchor: " + t.id);
    if (anchor->kind != UnitKind::Function) throw std::runtime_error("anchor is not a function: " + t.id);
    Query q = make_query(*anchor);
    if (a.query_source == "prefix") {
        const auto path = (fs::path(c.graph->repo_root()) / anchor->span.file_path).string();
        std::string source = read_text_file(path);
        if (anchor->span.start_byte > source.size()) throw std::runtime_error(path + " changed since indexing");
        std::size_t line_start = source.rfind('\n', anchor->span.start_byte == 0 ? 0 : anchor->span.start_byte - 1);
        line_start = line_start == std::string::npos || anchor->span.start_byte == 0 ? 0 : line_start + 1;
        q.text = source.substr(0, line_start) + q.text;
    }
    return q;
}

json retrieve_one(const RetrieveArgs& a, const Corpus& c, const Task& t, Scorer* scorer, bool with_latency) {
    const Bm25Params bm25{a.k1, a.b};
    bm25.validate();
    Query q = task_query(a, c, t);
    RetrievedContext ctx;
    ctx.anchor_id = q.anchor_id;
    json extra = json::object();

    if (a.mode == "hydra") {
        HydraConfig cfg;
        cfg.dar.threshold = a.threshold;
        cfg.dar.scope = {parse_kinds(a.kinds), !a.exclude_methods};
        cfg.dar.batch_size = a.scorer.batch_size;
        cfg.bm25 = bm25;
        cfg.k_sim = a.k;
        ctx = hydra_retrieve(*c.graph, c.bm25, q, cfg, *scorer);
        ctx.rendered_prompt = render_prompt(ctx, *c.graph, a.budget);
    } else {
        const auto start = std::chrono::steady_clock::now();
        if (a.mode == "dar") {
            DarConfig cfg;
            cfg.threshold = a.threshold;
            cfg.scope = {parse_kinds(a.kinds), !a.exclude_methods};
            cfg.batch_size = a.scorer.batch_size;
            auto scored = dar_score(*c.graph, q, cfg, *scorer);
            ctx.dependency_units = filter_by_threshold(scored, cfg.threshold);
            json arr = json::array();
            for (const auto& s : scored) arr.push_back({{"unit_id", s.unit_id}, {"probability", s.probability}});
            extra["scored"] = arr;
        } else if (a.mode == "bm25") {
            if (t.anchored)
                ctx.exemplar_hits = unit_bm25_topk(*c.graph, c.bm25, q, bm25, a.k);
            else
                ctx.exemplar_hits = c.bm25.topk_text(bm25, q.text, a.k);
        } else if (a.mode == "dense") {
            auto v = c.query_vectors.find(t.id);
            if (v == c.query_vectors.end()) throw std::runtime_error("no query vector for " + t.id);
            std::set<std::string> skip;
            if (t.anchored) skip = excluded_units(*c.graph, t.id);
            auto hits = cosine_rank(c.doc_vectors, v->second, a.k + skip.size());
            for (auto& h : hits) {
                if (skip.count(h.doc_id) || ctx.exemplar_hits.size() == a.k) continue;
                h.rank = static_cast<int>(ctx.exemplar_hits.size()) + 1;
                ctx.exemplar_hits.push_back(std::move(h));
            }
        } else {  // chunks
            std::function<bool(std::uint32_t)> skip;
            if (t.anchored) {
                const CodeUnit* anchor = c.graph->lookup(t.id);
                skip = [&c, anchor](std::uint32_t doc) {
                    const Chunk& ch = c.chunks->chunks[doc];
                    return ch.file_path == anchor->span.file_path && ch.start_byte < anchor->span.end_byte &&
                           anchor->span.start_byte < ch.end_byte;
                };
            }
            ctx.exemplar_hits = c.bm25.topk(bm25, tokenize_code(q.text), a.k, skip);
        }
        ctx.retrieval_latency_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    if (!with_latency) ctx.retrieval_latency_ms.reset();

    json rec = to_json(ctx);
    if (!t.anchored) {
        rec.erase("anchor_id");
        rec["id"] = t.id;
    }
    if (a.mode != "hydra") rec.erase("rendered_prompt");
    rec["mode"] = a.mode;
    for (auto& [key, value] : extra.items()) rec[key] = value;
    return rec;
}

/// Runs every task, one scorer per worker, results in task order.
std::vector<json> retrieve_all(const RetrieveArgs& a, const Corpus& c, const std::vector<Task>& tasks, unsigned jobs,
                               std::uint64_t seed, bool with_latency) {
    const bool needs_scorer = a.mode == "hydra" || a.mode == "dar";
    const unsigned workers = worker_count(tasks.size(), jobs);
    std::vector<std::unique_ptr<Scorer>> scorers(workers);
    if (needs_scorer) {
        for (auto& s : scorers) s = make_scorer(a.scorer, *c.graph, seed);
    }
    std::vector<json> records(tasks.size());
    parallel_for_workers(tasks.size(), jobs, [&](unsigned w, std::size_t i) {
        records[i] = retrieve_one(a, c, tasks[i], scorers[w].get(), with_latency);
    });
    return records;
}

int cmd_retrieve(const RetrieveArgs& a, const Global& g, std::ostream& out, std::ostream& err) {
    auto tasks = load_tasks(a);
    auto corpus = load_corpus(a, !a.tasks.empty());
    err << "hydra: retrieving " << tasks.size() << " tasks (mode " << a.mode << ", kernels "
        << kernels::isa_name(kernels::active_kernels().isa) << ")\n";
    std::string text;
    for (const auto& rec : retrieve_all(a, corpus, tasks, g.jobs, g.seed, !a.no_latency)) text += dump_line(rec);
    emit(a.out, text, out);
    return kOk;
}

int cmd_bench(const RetrieveArgs& a, const Global& g, std::ostream& out, std::ostream& err) {
    auto tasks = load_tasks(a);
    auto corpus = load_corpus(a, !a.tasks.empty());
    std::vector<double> samples;
    for (std::size_t r = 0; r < a.repeat; ++r) {
        // One worker keeps per-query timings free of contention.
        for (const auto& rec : retrieve_all(a, corpus, tasks, 1, g.seed, true))
            samples.push_back(rec.at("retrieval_latency_ms").get<double>());
    }
    err << "hydra: " << samples.size() << " timed queries\n";
    json report = to_json(latency_summary(samples));
    report["queries"] = samples.size();
    report["mode"] = a.mode;
    emit(a.out, dump_doc(report), out);
    return kOk;
}

// ---- evaluate

struct EvaluateArgs {
    std::string index;
    std::string tasks;
    std::string contexts;
    std::string solutions;
    std::string gold_deps;
    std::string retrieved = "dependencies";
    std::vector<int> ks = {1};
    std::string dir_aggregate = "mean";
    std::string out;
};

int cmd_evaluate(const EvaluateArgs& a, const Global& g, std::ostream& out, std::ostream& err) {
    auto graph = load_graph(a.index);
    EvalInputs in;
    in.ks = a.ks;
    in.dir_aggregate = parse_dir_aggregate(a.dir_aggregate);
    in.jobs = g.jobs;

    std::map<std::string, std::vector<std::string>> triplet_gold;
    for (const auto& rec : read_jsonl(a.tasks)) {
        std::string id;
        if (rec.contains("anchor_id"))
            id = rec.at("anchor_id").get<std::string>();
        else if (rec.contains("query"))
            id = rec.at("query").at("anchor_id").get<std::string>();
        else
            throw std::runtime_error(a.tasks + ": task record has no anchor_id");
        if (rec.contains("positives")) triplet_gold[id] = rec.at("positives").get<std::vector<std::string>>();
        in.task_ids.push_back(id);
    }

    std::map<std::string, std::vector<std::string>> explicit_gold;
    if (!a.gold_deps.empty()) {
        for (const auto& rec : read_jsonl(a.gold_deps))
            explicit_gold[rec.at("anchor_id").get<std::string>()] = rec.at("dependencies").get<std::vector<std::string>>();
    }
    DependencyOracle oracle(graph);
    for (const auto& id : in.task_ids) {
        std::vector<std::string> gold;
        if (auto it = explicit_gold.find(id); it != explicit_gold.end())
            gold = it->second;
        else if (auto jt = triplet_gold.find(id); jt != triplet_gold.end())
            gold = jt->second;
        else
            gold = oracle.analyze(candidate_scope(graph, id));
        in.gold[id] = std::set<std::string>(gold.begin(), gold.end());
    }

    if (!a.contexts.empty()) {
        for (const auto& rec : read_jsonl(a.contexts)) {
            auto ctx = context_from_json(rec);
            std::vector<std::string> ids;
            if (a.retrieved != "exemplars") ids = ctx.dependency_units;
            if (a.retrieved != "dependencies") {
                for (const auto& h : ctx.exemplar_hits) ids.push_back(h.doc_id);
            }
            in.retrieved[ctx.anchor_id] = ids;
            in.latency_ms[ctx.anchor_id] = ctx.retrieval_latency_ms;
        }
    }
    if (!a.solutions.empty()) {
        for (const auto& rec : read_jsonl(a.solutions)) in.solutions.push_back(solution_from_json(rec));
    }
    auto report = evaluate_report(graph, in);
    err << "hydra: evaluated " << in.task_ids.size() << " tasks\n";
    emit(a.out, dump_doc(report), out);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Repository-level retrieval for code generation"};
    app.name(args.empty() ? "hydra" : fs::path(args[0]).filename().string());
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    app.add_option("--jobs", g.jobs, "Worker threads (0 = all cores)");
    app.add_option("--seed", g.seed, "Seed for every random choice");

    IndexArgs ia;
    auto* index = app.add_subcommand("index", "Index a repository into units or chunks");
    index->add_option("repo", ia.repo, "Repository root")->required()->check(CLI::ExistingDirectory);
    index->add_option("--out", ia.out, "Index file (default: stdout)");
    index->add_option("--mode", ia.mode, "units or chunks")->check(CLI::IsMember({"units", "chunks"}));
    index->add_option("--chunk-size", ia.chunk_size, "Tokens per chunk")->check(CLI::PositiveNumber);
    index->add_option("--overlap", ia.overlap, "Chunk overlap fraction")->check(CLI::Range(0.0, 0.999999));
    index->add_option("--ignore", ia.ignore, "Extra ignore glob (repeatable)");
    index->add_flag("--no-default-ignores", ia.no_default_ignores, "Do not skip virtualenv and cache directories");

    DatasetArgs da;
    auto* dataset = app.add_subcommand("build-dataset", "Build triplets and seeded splits from a unit index");
    dataset->add_option("--index", da.index, "Unit index")->required()->check(CLI::ExistingFile);
    dataset->add_option("--out", da.out, "Triplets JSON Lines (default: stdout)");
    dataset->add_option("--split-dir", da.split_dir, "Write train/validation/test splits and balanced pairs here");
    dataset->add_option("--kinds", da.kinds, "Candidate kinds");
    dataset->add_flag("--exclude-methods", da.exclude_methods, "Leave methods out of the scope");

    ScorePairsArgs sa;
    auto* score = app.add_subcommand("score-pairs", "Score labeled pairs with a scorer");
    score->add_option("--index", sa.index, "Unit index")->required()->check(CLI::ExistingFile);
    score->add_option("--pairs", sa.pairs, "Pairs JSON Lines {anchor_id, candidate_id, label}")
        ->required()
        ->check(CLI::ExistingFile);
    score->add_option("--out", sa.out, "Scored pairs (default: stdout)");
    add_scorer_options(score, sa.scorer);

    TuneArgs ta;
    auto* tune = app.add_subcommand("tune-threshold", "Pick the threshold with the best BRP");
    tune->add_option("--scored", ta.scored, "Scored pairs {probability, label}")->required()->check(CLI::ExistingFile);
    tune->add_option("--grid", ta.grid, "start:stop:step");
    tune->add_option("--out", ta.out, "Report (default: stdout)");

    RetrieveArgs ra;
    auto* retrieve = app.add_subcommand("retrieve", "Retrieve context for each task");
    add_retrieve_options(retrieve, ra);
    retrieve->add_option("--out", ra.out, "Contexts JSON Lines (default: stdout)");
    retrieve->add_flag("--no-latency", ra.no_latency, "Write null latencies so output is reproducible");

    RetrieveArgs ba;
    auto* bench = app.add_subcommand("bench", "Retrieval latency summary");
    add_retrieve_options(bench, ba);
    bench->add_option("--repeat", ba.repeat, "Passes over the task list")->check(CLI::PositiveNumber);
    bench->add_option("--out", ba.out, "Summary (default: stdout)");

    EvaluateArgs ea;
    auto* evaluate = app.add_subcommand("evaluate", "Retrieval, pass@k and DIR report");
    evaluate->add_option("--index", ea.index, "Unit index")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--tasks", ea.tasks, "Tasks or triplets JSON Lines")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--contexts", ea.contexts, "Output of retrieve")->check(CLI::ExistingFile);
    evaluate->add_option("--solutions", ea.solutions, "Generated samples {anchor_id, sample_index, body_text, passed}")
        ->check(CLI::ExistingFile);
    evaluate->add_option("--gold-deps", ea.gold_deps, "Gold dependencies {anchor_id, dependencies}")
        ->check(CLI::ExistingFile);
    evaluate->add_option("--retrieved", ea.retrieved, "Context ids to score: dependencies, exemplars or all")
        ->check(CLI::IsMember({"dependencies", "exemplars", "all"}));
    evaluate->add_option("--k", ea.ks, "Pass@k values")->delimiter(',');
    evaluate->add_option("--dir-aggregate", ea.dir_aggregate, "DIR over samples: mean or best")
        ->check(CLI::IsMember({"mean", "best"}));
    evaluate->add_option("--out", ea.out, "Report (default: stdout)");

    std::vector<const char*> argv;
    for (const auto& s : args) argv.push_back(s.c_str());
    if (argv.empty()) argv.push_back("hydra");
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*index) return cmd_index(ia, g, out, err);
        if (*dataset) return cmd_build_dataset(da, g, out, err);
        if (*score) return cmd_score_pairs(sa, g, out, err);
        if (*tune) return cmd_tune(ta, g, out, err);
        if (*retrieve) return cmd_retrieve(ra, g, out, err);
        if (*bench) return cmd_bench(ba, g, out, err);
        if (*evaluate) return cmd_evaluate(ea, g, out, err);
    } catch (const std::exception& e) {
        err << "hydra: error: " << e.what() << "\n";
        return kRuntime;
    }
    return kUsage;
}

}  // namespace hydra::cli
