#include "hydra/jsonl.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hydra {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<nlohmann::json> parse_jsonl(const std::string& text, const std::string& origin) {
    std::vector<nlohmann::json> records;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            records.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::parse_error& e) {
            throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": invalid JSON: " + e.what());
        }
    }
    return records;
}

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
    return parse_jsonl(read_text_file(path), path);
}

std::string to_jsonl(const std::vector<nlohmann::json>& records) {
    std::string out;
    for (const auto& record : records) {
        out += record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        out += '\n';
    }
    return out;
}

void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& records) {
    write_text_file(path, to_jsonl(records));
}

}  // namespace hydra
