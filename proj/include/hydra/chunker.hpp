#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hydra/extractor.hpp"

namespace hydra {

struct ChunkOptions {
    std::size_t chunk_size = 2048;
    double overlap = 0.5;
};

/// Window start distance: ceil(chunk_size * (1 - overlap)).
std::size_t chunk_stride(const ChunkOptions& options);

/// A window of tokens over one file. Tokens are the identifier runs counted by
/// the retrieval tokenizer; `text` is the raw bytes from the first token of the
/// window through its last.
struct Chunk {
    std::string file_path;
    std::size_t chunk_index = 0;
    std::size_t token_start = 0;
    std::size_t token_end = 0;
    std::size_t start_byte = 0;
    std::size_t end_byte = 0;
    std::string text;

    std::string id() const { return file_path + "#" + std::to_string(chunk_index); }
    bool operator==(const Chunk&) const = default;
};

/// Windows start at every multiple of the stride below the token count; the
/// final partial window is kept. Throws std::invalid_argument on bad options.
std::vector<Chunk> chunk_file(const std::string& file_path, std::string_view text, const ChunkOptions& options);

struct ChunkIndex {
    std::string repo_root;
    std::vector<std::string> files;
    std::vector<Chunk> chunks;

    bool operator==(const ChunkIndex&) const = default;
};

ChunkIndex build_chunk_index(const std::string& repo_root, const ChunkOptions& chunk_options,
                             const ExtractionOptions& options = {});

nlohmann::json to_json(const ChunkIndex& index);
ChunkIndex chunk_index_from_json(const nlohmann::json& j);

}  // namespace hydra
