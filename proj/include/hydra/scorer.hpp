#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hydra/code_graph.hpp"
#include "hydra/dependency_oracle.hpp"
#include "hydra/rng.hpp"

namespace hydra {

/// One (query, candidate) pair to classify. `id` is what goes over the wire;
/// the unit ids let built-in scorers look at the graph.
struct ScoreRequest {
    std::string id;
    std::string query_text;
    std::string candidate_text;
    std::string anchor_id;
    std::string candidate_id;
};

class ScorerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pairwise dependency classifier: probability that the candidate is a true
/// dependency of the query's function. Instances are single-consumer.
class Scorer {
public:
    virtual ~Scorer() = default;
    /// One probability per request, in request order.
    virtual std::vector<double> score_batch(const std::vector<ScoreRequest>& batch) = 0;
    virtual std::string name() const = 0;
};

/// Logistic model over hand-picked overlap features between the query text
/// and the candidate unit.
class HeuristicScorer : public Scorer {
public:
    struct Features {
        double name_overlap = 0.0;  // share of the candidate's name parts present in the query
        double name_mentioned = 0.0;  // 1 when the full name appears as a query token
        double doc_overlap = 0.0;  // share of the candidate's docstring words present in the query
        double same_file = 0.0;
    };
    struct Weights {
        double bias = -2.2;
        double name_overlap = 2.5;
        double name_mentioned = 1.5;
        double doc_overlap = 2.0;
        double same_file = 0.8;
    };

    explicit HeuristicScorer(const CodeGraph& graph);
    HeuristicScorer(const CodeGraph& graph, Weights weights);

    Features features(const ScoreRequest& request) const;
    double probability(const Features& f) const;
    std::vector<double> score_batch(const std::vector<ScoreRequest>& batch) override;
    std::string name() const override { return "heuristic"; }

private:
    const CodeGraph& graph_;
    Weights weights_;
};

/// Test scorer backed by the static dependency oracle: 1 for true
/// dependencies, 0 otherwise.
class OracleScorer : public Scorer {
public:
    explicit OracleScorer(const CodeGraph& graph);
    std::vector<double> score_batch(const std::vector<ScoreRequest>& batch) override;
    std::string name() const override { return "oracle"; }

private:
    const std::set<std::string>& dependencies_of(const std::string& anchor_id);

    const CodeGraph& graph_;
    DependencyOracle oracle_;
    std::map<std::string, std::set<std::string>> cache_;
};

class ConstantScorer : public Scorer {
public:
    explicit ConstantScorer(double p);
    std::vector<double> score_batch(const std::vector<ScoreRequest>& batch) override;
    std::string name() const override { return "constant"; }

private:
    double p_;
};

/// Uniform probabilities derived from the seed and the request id, so a pair
/// gets the same value regardless of batching.
class RandomScorer : public Scorer {
public:
    explicit RandomScorer(std::uint64_t seed) : seed_(seed) {}
    std::vector<double> score_batch(const std::vector<ScoreRequest>& batch) override;
    std::string name() const override { return "random"; }

private:
    std::uint64_t seed_;
};

/// Forwards to another scorer and counts what passes through.
class CountingScorer : public Scorer {
public:
    explicit CountingScorer(Scorer& inner) : inner_(inner) {}
    std::vector<double> score_batch(const std::vector<ScoreRequest>& batch) override;
    std::string name() const override { return inner_.name(); }

    std::size_t pairs() const { return pairs_.load(); }
    std::size_t batches() const { return batches_.load(); }
    void reset() {
        pairs_ = 0;
        batches_ = 0;
    }

private:
    Scorer& inner_;
    std::atomic<std::size_t> pairs_{0};
    std::atomic<std::size_t> batches_{0};
};

/// External scorer process speaking JSON Lines on stdin/stdout. Requests are
/// {id, query_text, candidate_text}; responses are {id, probability}, in any
/// order. The process is started on first use and kept for later batches.
class SubprocessScorer : public Scorer {
public:
    struct Options {
        std::string command;  // run with /bin/sh -c
        long timeout_ms = default_timeout_ms();
    };
    /// HYDRA_SCORER_TIMEOUT_MS, or 30000.
    static long default_timeout_ms();

    explicit SubprocessScorer(Options options);
    ~SubprocessScorer() override;
    SubprocessScorer(const SubprocessScorer&) = delete;
    SubprocessScorer& operator=(const SubprocessScorer&) = delete;

    std::vector<double> score_batch(const std::vector<ScoreRequest>& batch) override;
    std::string name() const override { return "cmd"; }

private:
    void start();
    void stop(bool force);

    Options options_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string pending_;  // bytes read past the last complete line
};

}  // namespace hydra
