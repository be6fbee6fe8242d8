#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sldisco/pdag.hpp"

namespace sldisco::corpus {

// One stored example: row-major p*p feature (float32 on disk) and p*p label
// marks (uint8 on disk).
struct StoredPair {
    std::vector<float> feature;
    std::vector<std::uint8_t> label;
};

struct Corpus {
    int p = 0;
    int n = 0;
    std::uint64_t seed = 0;
    std::vector<StoredPair> items;

    PdagMatrix label_graph(int k) const;
};

struct GenerateOptions {
    int p = 5;
    int n = 1000;
    int count = 1;
    std::uint64_t seed = 1;
    int shard_size = 8192;
    int workers = 1;
};

// Writes shard-NNNNN.corpus files plus manifest.txt into out_dir. Item k is
// generated from derive_seed(seed, k), so the bytes do not depend on the
// worker count. Returns the manifest path.
std::filesystem::path generate_corpus(const GenerateOptions& opts,
                                      const std::filesystem::path& out_dir);

// Accepts the manifest path or its directory.
Corpus load_corpus(const std::filesystem::path& path);

// FNV-1a over the manifest bytes; recorded in model files to tie a model to
// the corpus it was trained on.
std::uint64_t file_fnv1a(const std::filesystem::path& path);
std::uint64_t bytes_fnv1a(const void* data, std::size_t size);
std::uint64_t manifest_hash(const std::filesystem::path& manifest_or_dir);

std::string hash_hex(std::uint64_t h);

}  // namespace sldisco::corpus
