#include "hydra/dataset.hpp"

#include <algorithm>

namespace hydra {

std::vector<Pair> expand_pairs(const std::vector<Triplet>& triplets) {
    std::vector<Pair> out;
    for (const auto& t : triplets) {
        for (const auto& id : t.positives) out.push_back({t.query.anchor_id, id, 1});
        for (const auto& id : t.negatives) out.push_back({t.query.anchor_id, id, 0});
    }
    return out;
}

SplitSizes split_sizes(std::size_t n) {
    SplitSizes s;
    s.validation = (n + 5) / 10;
    s.test = (n + 5) / 10;
    s.train = n - s.validation - s.test;
    return s;
}

std::vector<Pair> downsample_negatives(const std::vector<Pair>& pairs, Rng& rng) {
    std::vector<std::size_t> negatives;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (pairs[i].label == 1) ++positives;
        else negatives.push_back(i);
    }
    if (negatives.size() <= positives) return pairs;
    shuffle(negatives, rng);
    negatives.resize(positives);
    std::vector<bool> keep(pairs.size(), false);
    for (auto i : negatives) keep[i] = true;
    std::vector<Pair> out;
    out.reserve(2 * positives);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (pairs[i].label == 1 || keep[i]) out.push_back(pairs[i]);
    }
    return out;
}

DatasetSplit split_and_balance(std::vector<Triplet> triplets, std::uint64_t seed) {
    Rng rng(seed);
    shuffle(triplets, rng);
    SplitSizes sizes = split_sizes(triplets.size());
    DatasetSplit split;
    split.seed = seed;
    auto begin = std::make_move_iterator(triplets.begin());
    split.train.assign(begin, begin + static_cast<std::ptrdiff_t>(sizes.train));
    split.validation.assign(begin + static_cast<std::ptrdiff_t>(sizes.train),
                            begin + static_cast<std::ptrdiff_t>(sizes.train + sizes.validation));
    split.test.assign(begin + static_cast<std::ptrdiff_t>(sizes.train + sizes.validation),
                      std::make_move_iterator(triplets.end()));
    split.train_pairs = downsample_negatives(expand_pairs(split.train), rng);
    split.validation_pairs = expand_pairs(split.validation);
    split.test_pairs = expand_pairs(split.test);
    return split;
}

nlohmann::json to_json(const Pair& p) {
    return nlohmann::json{{"anchor_id", p.anchor_id}, {"candidate_id", p.candidate_id}, {"label", p.label}};
}

Pair pair_from_json(const nlohmann::json& j) {
    return {j.at("anchor_id").get<std::string>(), j.at("candidate_id").get<std::string>(), j.at("label").get<int>()};
}

namespace {

nlohmann::json pair_counts(const std::vector<Pair>& pairs) {
    std::size_t pos = 0;
    for (const auto& p : pairs) pos += p.label == 1;
    return {{"positive", pos}, {"negative", pairs.size() - pos}, {"total", pairs.size()}};
}

}  // namespace

nlohmann::json split_stats(const DatasetSplit& split) {
    return nlohmann::json{
        {"seed", split.seed},
        {"triplets",
         {{"train", split.train.size()},
          {"validation", split.validation.size()},
          {"test", split.test.size()},
          {"total", split.train.size() + split.validation.size() + split.test.size()}}},
        {"pairs",
         {{"train_before_balancing", pair_counts(expand_pairs(split.train))},
          {"train", pair_counts(split.train_pairs)},
          {"validation", pair_counts(split.validation_pairs)},
          {"test", pair_counts(split.test_pairs)}}},
    };
}

}  // namespace hydra
