#include "hydra/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "hydra/text_tokenizer.hpp"

namespace hydra {

void Bm25Params::validate() const {
    if (!(k1 > 0.0)) throw std::invalid_argument("bm25 k1 must be positive");
    if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("bm25 b must be in [0, 1]");
}

double bm25_idf(std::size_t doc_count, std::size_t doc_freq) {
    const double n = static_cast<double>(doc_count);
    const double df = static_cast<double>(doc_freq);
    return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

Bm25Index::Bm25Index(std::vector<std::string> doc_ids, const std::vector<std::vector<std::string>>& doc_tokens)
    : doc_ids_(std::move(doc_ids)) {
    if (doc_ids_.size() != doc_tokens.size()) throw std::invalid_argument("doc id / token list size mismatch");
    if (doc_ids_.size() >= (1u << 31)) throw std::length_error("too many documents");
    double total = 0.0;
    for (std::uint32_t d = 0; d < doc_ids_.size(); ++d) {
        if (!id_to_index_.emplace(doc_ids_[d], d).second) throw std::invalid_argument("duplicate doc id: " + doc_ids_[d]);
        std::map<std::string_view, std::uint32_t> counts;
        for (const auto& t : doc_tokens[d]) ++counts[t];
        for (const auto& [term, count] : counts) {
            auto& list = postings_[std::string(term)];
            list.docs.push_back(d);
            list.tf.push_back(static_cast<double>(count));
        }
        doc_lengths_.push_back(static_cast<double>(doc_tokens[d].size()));
        total += static_cast<double>(doc_tokens[d].size());
    }
    avgdl_ = doc_ids_.empty() ? 0.0 : total / static_cast<double>(doc_ids_.size());
}

Bm25Index Bm25Index::from_texts(std::vector<std::string> doc_ids, const std::vector<std::string>& texts) {
    std::vector<std::vector<std::string>> tokens;
    tokens.reserve(texts.size());
    for (const auto& t : texts) tokens.push_back(tokenize_code(t));
    return Bm25Index(std::move(doc_ids), tokens);
}

const Bm25Index::PostingList* Bm25Index::postings(std::string_view term) const {
    auto it = postings_.find(std::string(term));
    return it == postings_.end() ? nullptr : &it->second;
}

std::size_t Bm25Index::doc_freq(std::string_view term) const {
    const PostingList* p = postings(term);
    return p ? p->docs.size() : 0;
}

std::uint32_t Bm25Index::doc_index(std::string_view doc_id) const {
    auto it = id_to_index_.find(std::string(doc_id));
    if (it == id_to_index_.end()) throw std::out_of_range("unknown document: " + std::string(doc_id));
    return it->second;
}

namespace {

// avgdl is zero only when every document is empty; no posting exists then.
double safe_avgdl(double avgdl) { return avgdl > 0.0 ? avgdl : 1.0; }

}  // namespace

double Bm25Index::score(const Bm25Params& params, const std::vector<std::string>& query, std::string_view doc_id) const {
    params.validate();
    const std::uint32_t d = doc_index(doc_id);
    const double norm = params.k1 * ((1.0 - params.b) + params.b * (doc_lengths_[d] / safe_avgdl(avgdl_)));
    double total = 0.0;
    for (const auto& term : query) {
        const PostingList* p = postings(term);
        if (!p) continue;
        auto it = std::lower_bound(p->docs.begin(), p->docs.end(), d);
        if (it == p->docs.end() || *it != d) continue;
        const double tf = p->tf[static_cast<std::size_t>(it - p->docs.begin())];
        const double idf = bm25_idf(doc_count(), p->docs.size());
        total = total + idf * ((tf * (params.k1 + 1.0)) / (tf + norm));
    }
    return total;
}

std::vector<double> Bm25Index::score_all(const Bm25Params& params, const std::vector<std::string>& query,
                                         const kernels::KernelTable& kernels) const {
    params.validate();
    std::vector<double> scores(doc_count(), 0.0);
    if (doc_count() == 0) return scores;
    std::vector<double> norms(doc_count());
    kernels.bm25_norms(doc_lengths_.data(), doc_count(), params.k1, params.b, safe_avgdl(avgdl_), norms.data());
    for (const auto& term : query) {
        const PostingList* p = postings(term);
        if (!p) continue;
        kernels.bm25_accumulate(p->docs.data(), p->tf.data(), p->docs.size(), bm25_idf(doc_count(), p->docs.size()),
                                params.k1, norms.data(), scores.data());
    }
    return scores;
}

std::vector<RankedHit> rank_hits(std::vector<RankedHit> hits, std::size_t k) {
    auto better = [](const RankedHit& a, const RankedHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    };
    if (hits.size() > k) {
        std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(), better);
        hits.resize(k);
    } else {
        std::sort(hits.begin(), hits.end(), better);
    }
    for (std::size_t i = 0; i < hits.size(); ++i) hits[i].rank = static_cast<int>(i + 1);
    return hits;
}

std::vector<RankedHit> Bm25Index::topk(const Bm25Params& params, const std::vector<std::string>& query, std::size_t k,
                                       const std::function<bool(std::uint32_t)>& skip,
                                       const kernels::KernelTable& kernels) const {
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    auto scores = score_all(params, query, kernels);
    std::vector<RankedHit> hits;
    for (std::uint32_t d = 0; d < scores.size(); ++d) {
        if (scores[d] > 0.0 && !(skip && skip(d))) hits.push_back({doc_ids_[d], scores[d], 0});
    }
    return rank_hits(std::move(hits), k);
}

std::vector<RankedHit> Bm25Index::topk_text(const Bm25Params& params, std::string_view query_text, std::size_t k) const {
    return topk(params, tokenize_code(query_text), k);
}

}  // namespace hydra
