#include "hydra/chunker.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "hydra/jsonl.hpp"
#include "hydra/parallel.hpp"
#include "hydra/text_tokenizer.hpp"

namespace hydra {

std::size_t chunk_stride(const ChunkOptions& options) {
    if (options.chunk_size < 2) throw std::invalid_argument("chunk size must be at least 2");
    if (!(options.overlap >= 0.0 && options.overlap < 1.0)) throw std::invalid_argument("overlap must be in [0, 1)");
    double raw = static_cast<double>(options.chunk_size) * (1.0 - options.overlap);
    auto stride = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    return stride == 0 ? 1 : stride;
}

std::vector<Chunk> chunk_file(const std::string& file_path, std::string_view text, const ChunkOptions& options) {
    std::size_t stride = chunk_stride(options);
    auto spans = scan_token_spans(text);
    std::vector<Chunk> out;
    for (std::size_t start = 0; start < spans.size(); start += stride) {
        Chunk c;
        c.file_path = file_path;
        c.chunk_index = out.size();
        c.token_start = start;
        c.token_end = std::min(start + options.chunk_size, spans.size());
        c.start_byte = spans[c.token_start].begin;
        c.end_byte = spans[c.token_end - 1].end;
        c.text = std::string(text.substr(c.start_byte, c.end_byte - c.start_byte));
        out.push_back(std::move(c));
    }
    return out;
}

ChunkIndex build_chunk_index(const std::string& repo_root, const ChunkOptions& chunk_options,
                             const ExtractionOptions& options) {
    chunk_stride(chunk_options);
    ChunkIndex index;
    index.repo_root = std::filesystem::path(repo_root).lexically_normal().generic_string();
    if (index.repo_root.size() > 1 && index.repo_root.back() == '/') index.repo_root.pop_back();
    index.files = list_source_files(repo_root, options);
    std::vector<std::vector<Chunk>> per_file(index.files.size());
    parallel_for(index.files.size(), options.jobs, [&](std::size_t i) {
        std::string text = read_text_file((std::filesystem::path(repo_root) / index.files[i]).string());
        per_file[i] = chunk_file(index.files[i], text, chunk_options);
    });
    for (auto& chunks : per_file) {
        for (auto& c : chunks) index.chunks.push_back(std::move(c));
    }
    return index;
}

nlohmann::json to_json(const ChunkIndex& index) {
    nlohmann::json chunks = nlohmann::json::array();
    for (const auto& c : index.chunks) {
        chunks.push_back({{"id", c.id()},
                          {"file_path", c.file_path},
                          {"chunk_index", c.chunk_index},
                          {"token_start", c.token_start},
                          {"token_end", c.token_end},
                          {"start_byte", c.start_byte},
                          {"end_byte", c.end_byte},
                          {"text", c.text}});
    }
    return nlohmann::json{{"repo_root", index.repo_root},
                          {"files", index.files},
                          {"chunks", chunks},
                          {"import_edges", nlohmann::json::array()}};
}

ChunkIndex chunk_index_from_json(const nlohmann::json& j) {
    if (!j.contains("chunks")) throw std::invalid_argument("not a chunk index (missing \"chunks\")");
    ChunkIndex index;
    index.repo_root = j.at("repo_root").get<std::string>();
    index.files = j.at("files").get<std::vector<std::string>>();
    for (const auto& c : j.at("chunks")) {
        Chunk chunk;
        chunk.file_path = c.at("file_path").get<std::string>();
        chunk.chunk_index = c.at("chunk_index").get<std::size_t>();
        chunk.token_start = c.at("token_start").get<std::size_t>();
        chunk.token_end = c.at("token_end").get<std::size_t>();
        chunk.start_byte = c.at("start_byte").get<std::size_t>();
        chunk.end_byte = c.at("end_byte").get<std::size_t>();
        chunk.text = c.at("text").get<std::string>();
        index.chunks.push_back(std::move(chunk));
    }
    return index;
}

}  // namespace hydra
