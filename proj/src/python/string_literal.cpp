#include "hydra/python/string_literal.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace hydra::python {

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string normalize_newlines(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\r') {
            out.push_back('\n');
            if (i + 1 < s.size() && s[i + 1] == '\n') ++i;
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

std::string unescape(std::string_view body) {
    std::string out;
    out.reserve(body.size());
    for (std::size_t i = 0; i < body.size(); ++i) {
        char c = body[i];
        if (c != '\\' || i + 1 >= body.size()) {
            out.push_back(c);
            continue;
        }
        char e = body[++i];
        switch (e) {
            case '\n': break;
            case '\\': out.push_back('\\'); break;
            case '\'': out.push_back('\''); break;
            case '"': out.push_back('"'); break;
            case 'a': out.push_back('\a'); break;
            case 'b': out.push_back('\b'); break;
            case 'f': out.push_back('\f'); break;
            case 'n': out.push_back('\n'); break;
            case 'r': out.push_back('\r'); break;
            case 't': out.push_back('\t'); break;
            case 'v': out.push_back('\v'); break;
            case 'x':
            case 'u':
            case 'U': {
                std::size_t width = e == 'x' ? 2 : (e == 'u' ? 4 : 8);
                std::uint32_t cp = 0;
                bool ok = i + width < body.size();
                for (std::size_t k = 1; ok && k <= width; ++k) {
                    int h = i + k < body.size() ? hex_value(body[i + k]) : -1;
                    if (h < 0) ok = false;
                    else cp = cp * 16 + static_cast<std::uint32_t>(h);
                }
                if (ok && cp <= 0x10FFFF) {
                    append_utf8(out, cp);
                    i += width;
                } else {
                    out.push_back('\\');
                    out.push_back(e);
                }
                break;
            }
            default:
                if (e >= '0' && e <= '7') {
                    std::uint32_t cp = static_cast<std::uint32_t>(e - '0');
                    for (int k = 0; k < 2 && i + 1 < body.size() && body[i + 1] >= '0' && body[i + 1] <= '7'; ++k)
                        cp = cp * 8 + static_cast<std::uint32_t>(body[++i] - '0');
                    append_utf8(out, cp);
                } else {
                    // Unknown escapes (including \N{...}) are kept verbatim.
                    out.push_back('\\');
                    out.push_back(e);
                }
        }
    }
    return out;
}

std::string expand_tabs(std::string_view line) {
    std::string out;
    for (char c : line) {
        if (c == '\t') {
            out.append(8 - out.size() % 8, ' ');
        } else {
            out.push_back(c);
        }
    }
    return out;
}

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::optional<std::string> evaluate_string_literal(std::string_view text) {
    std::size_t q = text.find_first_of("'\"");
    if (q == std::string_view::npos) return std::nullopt;
    bool raw = false;
    for (char p : text.substr(0, q)) {
        char l = static_cast<char>(std::tolower(static_cast<unsigned char>(p)));
        if (l == 'b' || l == 'f') return std::nullopt;
        if (l == 'r') raw = true;
    }
    std::string_view rest = text.substr(q);
    std::size_t quote_len = (rest.size() >= 6 && rest.substr(0, 3) == std::string(3, rest[0])) ? 3 : 1;
    if (rest.size() < 2 * quote_len) return std::nullopt;
    std::string body = normalize_newlines(rest.substr(quote_len, rest.size() - 2 * quote_len));
    return raw ? body : unescape(body);
}

std::string cleandoc(std::string_view doc) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (true) {
        auto nl = doc.find('\n', start);
        std::string_view line = doc.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        lines.push_back(expand_tabs(line));
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    std::size_t margin = std::string::npos;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto content = lines[i].find_first_not_of(' ');
        if (content != std::string::npos) margin = std::min(margin, content);
    }
    auto first = lines[0].find_first_not_of(' ');
    lines[0] = first == std::string::npos ? "" : lines[0].substr(first);
    if (margin != std::string::npos) {
        for (std::size_t i = 1; i < lines.size(); ++i) lines[i] = lines[i].size() > margin ? lines[i].substr(margin) : "";
    }
    while (!lines.empty() && is_blank(lines.back())) lines.pop_back();
    std::size_t lead = 0;
    while (lead < lines.size() && is_blank(lines[lead])) ++lead;
    std::string out;
    for (std::size_t i = lead; i < lines.size(); ++i) {
        if (i > lead) out.push_back('\n');
        out += lines[i];
    }
    return out;
}

std::optional<std::string> docstring_of(const Node& body) {
    if (body.children.empty()) return std::nullopt;
    const Node& first = body.children.front();
    if (first.kind != Kind::Expr || first.children.empty()) return std::nullopt;
    const Node& value = first.children.front();
    if (value.kind != Kind::Constant || !value.flag) return std::nullopt;
    std::string text;
    for (const Node& piece : value.children) {
        auto v = evaluate_string_literal(piece.value);
        if (!v) return std::nullopt;
        text += *v;
    }
    return cleandoc(text);
}

}  // namespace hydra::python
