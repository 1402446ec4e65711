#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace hydra {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Parses one JSON document per non-blank line. Errors carry the line number.
std::vector<nlohmann::json> read_jsonl(const std::string& path);
std::vector<nlohmann::json> parse_jsonl(const std::string& text, const std::string& origin = "<memory>");
std::string to_jsonl(const std::vector<nlohmann::json>& records);
void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& records);

}  // namespace hydra
