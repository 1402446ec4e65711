#include "hydra/text_tokenizer.hpp"

namespace hydra {

namespace {

bool is_run_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c >= 0x80;
}
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (is_upper(c)) c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

}  // namespace

std::vector<TokenSpan> scan_token_spans(std::string_view text) {
    std::vector<TokenSpan> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_run_byte(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < text.size() && is_run_byte(static_cast<unsigned char>(text[i]))) ++i;
        out.push_back({start, i});
    }
    return out;
}

std::vector<std::string> split_identifier(std::string_view run) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= run.size()) {
        auto us = run.find('_', start);
        std::string_view piece = run.substr(start, us == std::string_view::npos ? std::string_view::npos : us - start);
        std::size_t b = 0;
        for (std::size_t i = 1; i < piece.size(); ++i) {
            bool lower_to_upper = is_upper(piece[i]) && !is_upper(piece[i - 1]);
            bool acronym_end = is_upper(piece[i - 1]) && is_upper(piece[i]) && i + 1 < piece.size() &&
                               is_lower(piece[i + 1]);
            bool boundary = lower_to_upper || acronym_end;
            if (boundary) {
                parts.push_back(lower(piece.substr(b, i - b)));
                b = i;
            }
        }
        if (b < piece.size()) parts.push_back(lower(piece.substr(b)));
        if (us == std::string_view::npos) break;
        start = us + 1;
    }
    return parts;
}

std::vector<std::string> tokenize_code(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& span : scan_token_spans(text)) {
        std::string_view run = text.substr(span.begin, span.end - span.begin);
        if (run.find_first_not_of('_') == std::string_view::npos) continue;
        std::string compound = lower(run);
        auto parts = split_identifier(run);
        out.push_back(compound);
        if (parts.size() >= 2 || (parts.size() == 1 && parts[0] != compound)) {
            for (auto& p : parts) out.push_back(std::move(p));
        }
    }
    return out;
}

}  // namespace hydra
