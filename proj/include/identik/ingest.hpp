#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "identik/data_model.hpp"

namespace identik {

struct IngestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedHeader : IngestError {
    using IngestError::IngestError;
};

struct BadRow : IngestError {
    int line_no;
    BadRow(int line, const std::string& reason)
        : IngestError("line " + std::to_string(line) + ": " + reason), line_no(line) {}
};

struct BadMagic : IngestError {
    using IngestError::IngestError;
};

struct TruncatedFile : IngestError {
    using IngestError::IngestError;
};

struct NonFiniteValue : IngestError {
    std::size_t flat_index;
    explicit NonFiniteValue(std::size_t idx)
        : IngestError("non-finite embedding value at flat index " + std::to_string(idx)),
          flat_index(idx) {}
};

inline constexpr const char* kManifestHeader =
    "image_id,subject_id,race,gender,capture_date,embedding_index";

// Manifest CSV: header above, then one row per image, UTF-8, no embedded
// commas in ids. Fail-fast on the first structural error.
std::vector<ImageRecord> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::vector<ImageRecord>& records,
                    const std::filesystem::path& path);

// Binary embeddings: 16-byte header = magic "EMB1", u32 LE dimension,
// u64 LE count, then count*dimension little-endian IEEE-754 f32, row-major.
EmbeddingStore read_embeddings(const std::filesystem::path& path);
void write_embeddings(const EmbeddingStore& store, const std::filesystem::path& path);

}  // namespace identik
