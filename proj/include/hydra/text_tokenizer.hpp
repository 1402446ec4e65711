#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace hydra {

/// Byte range of one identifier-like run ([A-Za-z0-9_] and non-ASCII bytes).
struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

std::vector<TokenSpan> scan_token_spans(std::string_view text);

/// Snake/camel parts of one run, lowercased ("HTTPServer_v2" -> http, server, v2).
std::vector<std::string> split_identifier(std::string_view run);

/// Retrieval tokens: each run lowercased, followed by its snake/camel parts
/// when splitting changes anything. Runs of only underscores are dropped.
std::vector<std::string> tokenize_code(std::string_view text);

}  // namespace hydra
