#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hydra/dependency_oracle.hpp"
#include "hydra/rng.hpp"

namespace hydra {

/// One (query, candidate) classification example expanded from a triplet.
struct Pair {
    std::string anchor_id;
    std::string candidate_id;
    int label = 0;  // 1 = true dependency

    bool operator==(const Pair&) const = default;
};

/// Positives then negatives, triplet by triplet.
std::vector<Pair> expand_pairs(const std::vector<Triplet>& triplets);

struct DatasetSplit {
    std::vector<Triplet> train;
    std::vector<Triplet> validation;
    std::vector<Triplet> test;
    std::uint64_t seed = 0;

    std::vector<Pair> train_pairs;  // balanced 1:1
    std::vector<Pair> validation_pairs;
    std::vector<Pair> test_pairs;
};

/// Sizes of the 8:1:1 split: validation and test get round(n/10) each.
struct SplitSizes {
    std::size_t train = 0;
    std::size_t validation = 0;
    std::size_t test = 0;
};
SplitSizes split_sizes(std::size_t n);

/// Keeps every positive and a seeded uniform sample of as many negatives, in
/// original order. No-op when negatives do not outnumber positives.
std::vector<Pair> downsample_negatives(const std::vector<Pair>& pairs, Rng& rng);

/// Seeded shuffle, 8:1:1 split, then negative downsampling of the train pairs.
DatasetSplit split_and_balance(std::vector<Triplet> triplets, std::uint64_t seed);

nlohmann::json to_json(const Pair& p);
Pair pair_from_json(const nlohmann::json& j);

/// Triplet and pair counts per split, before and after balancing.
nlohmann::json split_stats(const DatasetSplit& split);

}  // namespace hydra
