#include "hydra/scorer.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "hydra/text_tokenizer.hpp"

namespace hydra {

namespace {

const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> words = {
        "a",     "an",    "and",   "are",    "as",     "at",     "be",     "by",    "def",   "class",
        "for",   "from",  "if",    "in",     "into",   "is",     "it",     "its",   "of",    "on",
        "or",    "the",   "that",  "this",   "to",     "with",   "return", "returns", "self", "cls",
        "none",  "true",  "false", "str",    "int",    "bool",   "float",  "list",  "dict",  "args",
        "kwargs", "async", "not",  "given",  "when",   "else",   "than",   "value", "object", "any",
    };
    return words;
}

std::unordered_set<std::string> content_tokens(std::string_view text) {
    std::unordered_set<std::string> out;
    for (auto& t : tokenize_code(text)) {
        if (!stopwords().count(t)) out.insert(std::move(t));
    }
    return out;
}

double share_present(const std::unordered_set<std::string>& needles, const std::unordered_set<std::string>& hay) {
    if (needles.empty()) return 0.0;
    std::size_t hit = 0;
    for (const auto& n : needles) hit += hay.count(n);
    return static_cast<double>(hit) / static_cast<double>(needles.size());
}

}  // namespace

HeuristicScorer::HeuristicScorer(const CodeGraph& graph) : HeuristicScorer(graph, Weights{}) {}

HeuristicScorer::HeuristicScorer(const CodeGraph& graph, Weights weights) : graph_(graph), weights_(weights) {}

HeuristicScorer::Features HeuristicScorer::features(const ScoreRequest& request) const {
    Features f;
    const CodeUnit* cand = graph_.lookup(request.candidate_id);
    if (!cand) throw ScorerError("heuristic scorer: unknown candidate " + request.candidate_id);
    const auto query = content_tokens(request.query_text);

    const auto name_tokens = tokenize_code(cand->short_name());
    if (!name_tokens.empty()) {
        std::unordered_set<std::string> parts(name_tokens.begin() + (name_tokens.size() > 1 ? 1 : 0), name_tokens.end());
        std::unordered_set<std::string> content;
        for (const auto& p : parts) {
            if (!stopwords().count(p)) content.insert(p);
        }
        f.name_overlap = share_present(content.empty() ? parts : content, query);
        f.name_mentioned = query.count(name_tokens.front()) ? 1.0 : 0.0;
    }
    if (cand->docstring) f.doc_overlap = share_present(content_tokens(*cand->docstring), query);

    const CodeUnit* anchor = graph_.lookup(request.anchor_id);
    if (anchor && anchor->span.file_path == cand->span.file_path) f.same_file = 1.0;
    return f;
}

double HeuristicScorer::probability(const Features& f) const {
    const double z = weights_.bias + weights_.name_overlap * f.name_overlap + weights_.name_mentioned * f.name_mentioned +
                     weights_.doc_overlap * f.doc_overlap + weights_.same_file * f.same_file;
    return 1.0 / (1.0 + std::exp(-z));
}

std::vector<double> HeuristicScorer::score_batch(const std::vector<ScoreRequest>& batch) {
    std::vector<double> out;
    out.reserve(batch.size());
    for (const auto& r : batch) out.push_back(probability(features(r)));
    return out;
}

OracleScorer::OracleScorer(const CodeGraph& graph) : graph_(graph), oracle_(graph) {}

const std::set<std::string>& OracleScorer::dependencies_of(const std::string& anchor_id) {
    auto it = cache_.find(anchor_id);
    if (it != cache_.end()) return it->second;
    auto deps = oracle_.analyze(candidate_scope(graph_, anchor_id));
    return cache_.emplace(anchor_id, std::set<std::string>(deps.begin(), deps.end())).first->second;
}

std::vector<double> OracleScorer::score_batch(const std::vector<ScoreRequest>& batch) {
    std::vector<double> out;
    out.reserve(batch.size());
    for (const auto& r : batch) out.push_back(dependencies_of(r.anchor_id).count(r.candidate_id) ? 1.0 : 0.0);
    return out;
}

ConstantScorer::ConstantScorer(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("constant probability must be in [0, 1]");
}

std::vector<double> ConstantScorer::score_batch(const std::vector<ScoreRequest>& batch) {
    return std::vector<double>(batch.size(), p_);
}

std::vector<double> RandomScorer::score_batch(const std::vector<ScoreRequest>& batch) {
    std::vector<double> out;
    out.reserve(batch.size());
    for (const auto& r : batch) {
        std::uint64_t h = 14695981039346656037ull;  // FNV-1a
        for (unsigned char c : r.id) {
            h ^= c;
            h *= 1099511628211ull;
        }
        Rng rng(h ^ seed_);
        out.push_back(uniform_real(rng));
    }
    return out;
}

std::vector<double> CountingScorer::score_batch(const std::vector<ScoreRequest>& batch) {
    pairs_ += batch.size();
    ++batches_;
    return inner_.score_batch(batch);
}

long SubprocessScorer::default_timeout_ms() {
    const char* env = std::getenv("HYDRA_SCORER_TIMEOUT_MS");
    if (!env || !*env) return 30000;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v <= 0) throw std::invalid_argument(std::string("bad HYDRA_SCORER_TIMEOUT_MS: ") + env);
    return v;
}

SubprocessScorer::SubprocessScorer(Options options) : options_(std::move(options)) {
    if (options_.command.empty()) throw std::invalid_argument("scorer command is empty");
    if (options_.timeout_ms <= 0) throw std::invalid_argument("scorer timeout must be positive");
}

SubprocessScorer::~SubprocessScorer() { stop(false); }

void SubprocessScorer::start() {
    // Sockets rather than pipes so writes can pass MSG_NOSIGNAL.
    int in_pair[2], out_pair[2];
    if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, in_pair) != 0)
        throw ScorerError(std::string("socketpair: ") + std::strerror(errno));
    if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, out_pair) != 0) {
        close(in_pair[0]);
        close(in_pair[1]);
        throw ScorerError(std::string("socketpair: ") + std::strerror(errno));
    }
    pid_t pid = fork();
    if (pid < 0) {
        for (int fd : {in_pair[0], in_pair[1], out_pair[0], out_pair[1]}) close(fd);
        throw ScorerError(std::string("fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        dup2(in_pair[1], STDIN_FILENO);
        dup2(out_pair[1], STDOUT_FILENO);
        execl("/bin/sh", "sh", "-c", options_.command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(in_pair[1]);
    close(out_pair[1]);
    pid_ = pid;
    to_child_ = in_pair[0];
    from_child_ = out_pair[0];
    fcntl(to_child_, F_SETFL, fcntl(to_child_, F_GETFL) | O_NONBLOCK);
    fcntl(from_child_, F_SETFL, fcntl(from_child_, F_GETFL) | O_NONBLOCK);
    pending_.clear();
}

void SubprocessScorer::stop(bool force) {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    to_child_ = from_child_ = -1;
    if (pid_ <= 0) return;
    if (force) kill(pid_, SIGKILL);
    int status = 0;
    for (int i = 0; i < 100; ++i) {
        if (waitpid(pid_, &status, WNOHANG) != 0) {
            pid_ = -1;
            return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    kill(pid_, SIGKILL);
    waitpid(pid_, &status, 0);
    pid_ = -1;
}

std::vector<double> SubprocessScorer::score_batch(const std::vector<ScoreRequest>& batch) {
    if (batch.empty()) return {};
    if (pid_ < 0) start();

    std::unordered_map<std::string, std::size_t> slot;
    std::string out;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (!slot.emplace(batch[i].id, i).second) throw ScorerError("duplicate request id " + batch[i].id);
        nlohmann::json req = {{"id", batch[i].id},
                              {"query_text", batch[i].query_text},
                              {"candidate_text", batch[i].candidate_text}};
        out += req.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        out += '\n';
    }

    auto fail = [&](const std::string& why) -> ScorerError {
        stop(true);
        return ScorerError("scorer command failed: " + why);
    };

    std::vector<double> probs(batch.size(), -1.0);
    std::size_t answered = 0;
    std::size_t written = 0;
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(options_.timeout_ms);
    char buf[65536];

    while (answered < batch.size()) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) throw fail("timed out after " + std::to_string(options_.timeout_ms) + " ms");
        pollfd fds[2] = {{from_child_, POLLIN, 0}, {to_child_, POLLOUT, 0}};
        int nfds = written < out.size() ? 2 : 1;
        int rc = poll(fds, nfds, static_cast<int>(left.count()));
        if (rc < 0) {
            if (errno == EINTR) continue;
            throw fail(std::string("poll: ") + std::strerror(errno));
        }
        if (nfds == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
            ssize_t n = send(to_child_, out.data() + written, out.size() - written, MSG_NOSIGNAL);
            if (n < 0 && errno != EAGAIN && errno != EINTR) throw fail(std::string("write: ") + std::strerror(errno));
            if (n > 0) written += static_cast<std::size_t>(n);
        }
        if (fds[0].revents & (POLLIN | POLLERR | POLLHUP)) {
            ssize_t n = read(from_child_, buf, sizeof buf);
            if (n < 0 && errno != EAGAIN && errno != EINTR) throw fail(std::string("read: ") + std::strerror(errno));
            if (n == 0) throw fail("process exited with " + std::to_string(answered) + " of " +
                                   std::to_string(batch.size()) + " responses");
            if (n > 0) pending_.append(buf, static_cast<std::size_t>(n));
            std::size_t nl;
            while ((nl = pending_.find('\n')) != std::string::npos) {
                std::string line = pending_.substr(0, nl);
                pending_.erase(0, nl + 1);
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                nlohmann::json resp;
                try {
                    resp = nlohmann::json::parse(line);
                } catch (const nlohmann::json::exception& e) {
                    throw fail("malformed response line: " + line);
                }
                if (!resp.is_object() || !resp.contains("id") || !resp["id"].is_string() || !resp.contains("probability") ||
                    !resp["probability"].is_number())
                    throw fail("response lacks id or probability: " + line);
                auto it = slot.find(resp["id"].get<std::string>());
                if (it == slot.end()) throw fail("response for unknown id: " + line);
                double p = resp["probability"].get<double>();
                if (!(p >= 0.0 && p <= 1.0)) throw fail("probability out of [0, 1]: " + line);
                if (probs[it->second] >= 0.0) throw fail("duplicate response: " + line);
                probs[it->second] = p;
                ++answered;
            }
        }
    }
    return probs;
}

}  // namespace hydra
