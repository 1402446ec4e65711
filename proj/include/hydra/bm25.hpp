#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hydra/kernels.hpp"

namespace hydra {

struct Bm25Params {
    double k1 = 1.5;
    double b = 0.75;

    /// Throws std::invalid_argument unless k1 > 0 and 0 <= b <= 1.
    void validate() const;
};

struct RankedHit {
    std::string doc_id;
    double score = 0.0;
    int rank = 0;  // 1-based

    bool operator==(const RankedHit&) const = default;
};

/// ln((N - n + 0.5) / (n + 0.5) + 1)
double bm25_idf(std::size_t doc_count, std::size_t doc_freq);

/// Inverted index over tokenized documents.
class Bm25Index {
public:
    struct PostingList {
        std::vector<std::uint32_t> docs;  // ascending
        std::vector<double> tf;
    };

    Bm25Index() = default;
    Bm25Index(std::vector<std::string> doc_ids, const std::vector<std::vector<std::string>>& doc_tokens);

    /// Tokenizes each text with tokenize_code.
    static Bm25Index from_texts(std::vector<std::string> doc_ids, const std::vector<std::string>& texts);

    std::size_t doc_count() const { return doc_ids_.size(); }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    const std::vector<double>& doc_lengths() const { return doc_lengths_; }
    double avgdl() const { return avgdl_; }
    const PostingList* postings(std::string_view term) const;
    std::size_t doc_freq(std::string_view term) const;
    /// Position of a doc id; throws std::out_of_range when unknown.
    std::uint32_t doc_index(std::string_view doc_id) const;

    /// Sum over query tokens (duplicates included). Throws for unknown docs.
    double score(const Bm25Params& params, const std::vector<std::string>& query, std::string_view doc_id) const;

    /// Scores of every document, indexed like doc_ids().
    std::vector<double> score_all(const Bm25Params& params, const std::vector<std::string>& query,
                                  const kernels::KernelTable& kernels = kernels::active_kernels()) const;

    /// Top-k with positive score, ties broken by ascending doc id. Documents
    /// for which `skip` returns true are never ranked.
    std::vector<RankedHit> topk(const Bm25Params& params, const std::vector<std::string>& query, std::size_t k,
                                const std::function<bool(std::uint32_t)>& skip = {},
                                const kernels::KernelTable& kernels = kernels::active_kernels()) const;

    std::vector<RankedHit> topk_text(const Bm25Params& params, std::string_view query_text, std::size_t k) const;

private:
    std::vector<std::string> doc_ids_;
    std::vector<double> doc_lengths_;
    double avgdl_ = 0.0;
    std::unordered_map<std::string, std::uint32_t> id_to_index_;
    std::unordered_map<std::string, PostingList> postings_;
};

/// Orders (score desc, id asc) and assigns ranks; keeps at most k.
std::vector<RankedHit> rank_hits(std::vector<RankedHit> hits, std::size_t k);

}  // namespace hydra
