#include "hydra/eval.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "hydra/parallel.hpp"

namespace hydra {

namespace {

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::size_t overlap(const std::set<std::string>& a, const std::set<std::string>& b) {
    std::size_t n = 0;
    for (const auto& x : a) n += b.count(x);
    return n;
}

}  // namespace

RetrievalEval retrieval_eval(const std::set<std::string>& retrieved, const std::set<std::string>& gold,
                             const CodeGraph& graph) {
    if (gold.empty()) throw std::invalid_argument("retrieval_eval needs a non-empty gold set");
    RetrievalEval e;
    const std::size_t hit = overlap(retrieved, gold);
    e.precision = ratio(hit, retrieved.size());
    e.recall = ratio(hit, gold.size());
    e.f1 = e.precision + e.recall > 0.0 ? 2.0 * e.precision * e.recall / (e.precision + e.recall) : 0.0;

    auto kind_recall = [&](UnitKind kind) -> std::optional<double> {
        std::set<std::string> g, r;
        for (const auto& id : gold) {
            const CodeUnit* u = graph.lookup(id);
            if (u && u->kind == kind) g.insert(id);
        }
        if (g.empty()) return std::nullopt;
        for (const auto& id : retrieved) {
            const CodeUnit* u = graph.lookup(id);
            if (u && u->kind == kind) r.insert(id);
        }
        return ratio(overlap(r, g), g.size());
    };
    e.frecall = kind_recall(UnitKind::Function);
    e.crecall = kind_recall(UnitKind::Class);
    e.vrecall = kind_recall(UnitKind::Variable);
    return e;
}

double pass_at_k(int n, int c, int k) {
    if (n < 0 || c < 0 || c > n) throw std::invalid_argument("pass@k needs 0 <= c <= n");
    if (k < 1 || k > n) throw std::invalid_argument("pass@k needs 1 <= k <= n");
    if (n - c < k) return 1.0;
    double miss = 1.0;  // C(n-c, k) / C(n, k)
    for (int i = n - c + 1; i <= n; ++i) miss *= 1.0 - static_cast<double>(k) / static_cast<double>(i);
    return 1.0 - miss;
}

double dependency_invocation_rate(const std::set<std::string>& invoked, const std::set<std::string>& gold) {
    if (gold.empty()) throw std::invalid_argument("DIR needs a non-empty gold set");
    return ratio(overlap(invoked, gold), gold.size());
}

LatencySummary latency_summary(std::vector<double> samples_ms) {
    if (samples_ms.empty()) throw std::invalid_argument("latency summary of an empty sample");
    std::sort(samples_ms.begin(), samples_ms.end());
    LatencySummary s;
    const std::size_t n = samples_ms.size();
    s.min = samples_ms.front();
    s.max = samples_ms.back();
    s.mean = std::accumulate(samples_ms.begin(), samples_ms.end(), 0.0) / static_cast<double>(n);
    s.median = n % 2 ? samples_ms[n / 2] : (samples_ms[n / 2 - 1] + samples_ms[n / 2]) / 2.0;
    return s;
}

namespace {

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const RetrievalEval& e) {
    return {{"precision", e.precision}, {"recall", e.recall}, {"f1", e.f1},
            {"frecall", opt(e.frecall)}, {"crecall", opt(e.crecall)}, {"vrecall", opt(e.vrecall)}};
}

nlohmann::json to_json(const LatencySummary& s) {
    return {{"min", s.min}, {"max", s.max}, {"mean", s.mean}, {"median", s.median}};
}

Solution solution_from_json(const nlohmann::json& j) {
    Solution s;
    s.anchor_id = j.at("anchor_id").get<std::string>();
    s.sample_index = j.value("sample_index", 0);
    s.body_text = j.at("body_text").get<std::string>();
    s.passed = j.at("passed").get<bool>();
    return s;
}

DirResult solution_dir(const DependencyOracle& oracle, const CandidateScope& scope, const std::string& source,
                       const std::set<std::string>& gold) {
    DirResult r;
    auto invoked = oracle.analyze_source(scope, source);
    if (!invoked) {
        r.parsed = false;
        return r;
    }
    r.invoked = *invoked;
    r.rate = dependency_invocation_rate(std::set<std::string>(invoked->begin(), invoked->end()), gold);
    return r;
}

DirAggregate parse_dir_aggregate(const std::string& text) {
    if (text == "mean") return DirAggregate::Mean;
    if (text == "best") return DirAggregate::Best;
    throw std::invalid_argument("DIR aggregate must be mean or best, got " + text);
}

namespace {

struct TaskResult {
    nlohmann::json record;
    std::optional<RetrievalEval> retrieval;
    std::map<int, double> pass;
    std::optional<double> dir;
    std::size_t unparsed = 0;
};

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

nlohmann::json evaluate_report(const CodeGraph& graph, const EvalInputs& in) {
    std::map<std::string, std::vector<const Solution*>> by_task;
    for (const auto& s : in.solutions) by_task[s.anchor_id].push_back(&s);
    for (auto& [id, list] : by_task) {
        std::stable_sort(list.begin(), list.end(),
                         [](const Solution* a, const Solution* b) { return a->sample_index < b->sample_index; });
    }

    DependencyOracle oracle(graph);
    std::vector<TaskResult> results(in.task_ids.size());
    parallel_for(in.task_ids.size(), in.jobs, [&](std::size_t i) {
        const auto& id = in.task_ids[i];
        TaskResult& t = results[i];
        auto g = in.gold.find(id);
        const std::set<std::string> gold = g == in.gold.end() ? std::set<std::string>{} : g->second;
        t.record = {{"anchor_id", id}, {"gold", std::vector<std::string>(gold.begin(), gold.end())}};

        auto r = in.retrieved.find(id);
        if (r != in.retrieved.end() && !gold.empty()) {
            t.retrieval = retrieval_eval(std::set<std::string>(r->second.begin(), r->second.end()), gold, graph);
            t.record["retrieval"] = to_json(*t.retrieval);
        } else {
            t.record["retrieval"] = nullptr;
        }
        auto lat = in.latency_ms.find(id);
        t.record["retrieval_latency_ms"] = lat == in.latency_ms.end() ? nlohmann::json(nullptr) : opt(lat->second);

        auto s = by_task.find(id);
        if (s == by_task.end()) {
            t.record["samples"] = 0;
            t.record["pass_at_k"] = nullptr;
            t.record["dir"] = nullptr;
            return;
        }
        const auto& samples = s->second;
        const int n = static_cast<int>(samples.size());
        int c = 0;
        for (const auto* x : samples) c += x->passed ? 1 : 0;
        nlohmann::json pass = nlohmann::json::object();
        for (int k : in.ks) {
            if (k > n)
                throw std::invalid_argument("task " + id + " has " + std::to_string(n) + " samples, fewer than k=" +
                                            std::to_string(k));
            t.pass[k] = pass_at_k(n, c, k);
            pass[std::to_string(k)] = t.pass[k];
        }
        t.record["samples"] = n;
        t.record["passed"] = c;
        t.record["pass_at_k"] = pass;

        if (gold.empty()) {
            t.record["dir"] = nullptr;
            return;
        }
        const auto scope = candidate_scope(graph, id);
        nlohmann::json per_sample = nlohmann::json::array();
        std::vector<double> rates;
        for (const auto* x : samples) {
            auto d = solution_dir(oracle, scope, x->body_text, gold);
            if (!d.parsed) ++t.unparsed;
            rates.push_back(d.rate);
            per_sample.push_back({{"sample_index", x->sample_index}, {"dir", d.rate}, {"parsed", d.parsed},
                                  {"invoked", d.invoked}});
        }
        t.dir = in.dir_aggregate == DirAggregate::Best ? *std::max_element(rates.begin(), rates.end()) : mean_of(rates);
        t.record["dir"] = *t.dir;
        t.record["dir_samples"] = per_sample;
    });

    nlohmann::json tasks = nlohmann::json::array();
    std::vector<double> precision, recall, f1, fr, cr, vr, dirs, latencies;
    std::map<int, std::vector<double>> pass;
    std::size_t unparsed = 0;
    for (auto& t : results) {
        tasks.push_back(std::move(t.record));
        if (t.retrieval) {
            precision.push_back(t.retrieval->precision);
            recall.push_back(t.retrieval->recall);
            f1.push_back(t.retrieval->f1);
            if (t.retrieval->frecall) fr.push_back(*t.retrieval->frecall);
            if (t.retrieval->crecall) cr.push_back(*t.retrieval->crecall);
            if (t.retrieval->vrecall) vr.push_back(*t.retrieval->vrecall);
        }
        for (auto [k, v] : t.pass) pass[k].push_back(v);
        if (t.dir) dirs.push_back(*t.dir);
        unparsed += t.unparsed;
    }
    for (const auto& [id, v] : in.latency_ms) {
        if (v) latencies.push_back(*v);
    }

    auto mean_or_null = [](const std::vector<double>& v) { return v.empty() ? nlohmann::json(nullptr) : nlohmann::json(mean_of(v)); };
    nlohmann::json summary = {{"tasks", in.task_ids.size()}};
    summary["retrieval"] = {{"tasks", precision.size()},  {"precision", mean_or_null(precision)},
                            {"recall", mean_or_null(recall)}, {"f1", mean_or_null(f1)},
                            {"frecall", mean_or_null(fr)},   {"crecall", mean_or_null(cr)},
                            {"vrecall", mean_or_null(vr)}};
    nlohmann::json pass_summary = nlohmann::json::object();
    for (const auto& [k, v] : pass) pass_summary[std::to_string(k)] = mean_of(v);
    summary["pass_at_k"] = pass_summary;
    summary["dir"] = mean_or_null(dirs);
    summary["dir_aggregate"] = in.dir_aggregate == DirAggregate::Best ? "best" : "mean";
    summary["unparsed_samples"] = unparsed;
    summary["latency_ms"] = latencies.empty() ? nlohmann::json(nullptr) : to_json(latency_summary(latencies));
    return {{"summary", summary}, {"tasks", tasks}};
}

}  // namespace hydra
