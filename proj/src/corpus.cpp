#include "sldisco/corpus.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "sldisco/errors.hpp"
#include "sldisco/rng.hpp"
#include "sldisco/sim.hpp"

namespace sldisco::corpus {

namespace {

constexpr char kShardMagic[8] = {'S', 'L', 'D', 'C', 'O', 'R', 'P', '1'};

std::string shard_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "shard-%05d.corpus", index);
    return buf;
}

StoredPair store(const sim::TrainingPair& pair) {
    const int p = static_cast<int>(pair.feature.rows());
    StoredPair out;
    out.feature.resize(static_cast<std::size_t>(p) * p);
    out.label.resize(static_cast<std::size_t>(p) * p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            out.feature[static_cast<std::size_t>(i) * p + j] =
                static_cast<float>(pair.feature(i, j));
            out.label[static_cast<std::size_t>(i) * p + j] =
                static_cast<std::uint8_t>(pair.label.entry(i, j));
        }
    return out;
}

void write_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::ifstream& in, const std::string& path) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw DataError(path + ": truncated shard");
    return v;
}

std::map<std::string, std::string> parse_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DataError(path.string() + ": bad manifest line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

std::filesystem::path resolve_manifest(const std::filesystem::path& path) {
    if (std::filesystem::is_directory(path)) return path / "manifest.txt";
    return path;
}

}  // namespace

PdagMatrix Corpus::label_graph(int k) const {
    PdagMatrix g(p);
    const auto& lab = items[static_cast<std::size_t>(k)].label;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            g.set_entry(i, j, lab[static_cast<std::size_t>(i) * p + j]);
    return g;
}

std::filesystem::path generate_corpus(const GenerateOptions& opts,
                                      const std::filesystem::path& out_dir) {
    if (opts.count < 1) throw DataError("generate_corpus: count must be at least 1");
    if (opts.p < 2) throw DataError("generate_corpus: p must be at least 2");
    if (opts.shard_size < 1) throw DataError("generate_corpus: shard_size must be positive");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);

    std::vector<StoredPair> items(static_cast<std::size_t>(opts.count));
    const int workers = std::max(1, opts.workers);
    auto fill = [&](int begin, int end) {
        for (int k = begin; k < end; ++k)
            items[static_cast<std::size_t>(k)] = store(sim::make_training_pair(
                opts.p, opts.n, derive_seed(opts.seed, static_cast<std::uint64_t>(k))));
    };
    if (workers == 1) {
        fill(0, opts.count);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (opts.count + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int begin = w * chunk;
            const int end = std::min(opts.count, begin + chunk);
            if (begin < end) pool.emplace_back(fill, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    const int n_shards = (opts.count + opts.shard_size - 1) / opts.shard_size;
    std::string shard_list;
    for (int s = 0; s < n_shards; ++s) {
        const std::string name = shard_name(s);
        if (s) shard_list += ',';
        shard_list += name;
        const auto path = out_dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot write " + path.string());
        const int begin = s * opts.shard_size;
        const int end = std::min(opts.count, begin + opts.shard_size);
        out.write(kShardMagic, sizeof(kShardMagic));
        write_u32(out, static_cast<std::uint32_t>(end - begin));
        write_u32(out, static_cast<std::uint32_t>(opts.p));
        for (int k = begin; k < end; ++k) {
            const auto& item = items[static_cast<std::size_t>(k)];
            out.write(reinterpret_cast<const char*>(item.feature.data()),
                      static_cast<std::streamsize>(item.feature.size() * sizeof(float)));
            out.write(reinterpret_cast<const char*>(item.label.data()),
                      static_cast<std::streamsize>(item.label.size()));
        }
        if (!out) throw DataError("write failed: " + path.string());
    }

    const auto manifest_path = out_dir / "manifest.txt";
    std::ofstream man(manifest_path);
    if (!man) throw DataError("cannot write " + manifest_path.string());
    man << "format=sldisco-corpus-v1\n"
        << "p=" << opts.p << '\n'
        << "n=" << opts.n << '\n'
        << "count=" << opts.count << '\n'
        << "seed=" << opts.seed << '\n'
        << "shard_size=" << opts.shard_size << '\n'
        << "shards=" << shard_list << '\n';
    if (!man) throw DataError("write failed: " + manifest_path.string());
    return manifest_path;
}

Corpus load_corpus(const std::filesystem::path& path) {
    const auto manifest_path = resolve_manifest(path);
    const auto kv = parse_manifest(manifest_path);
    const auto need = [&](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end())
            throw DataError(manifest_path.string() + ": missing key '" + key + "'");
        return it->second;
    };
    Corpus corpus;
    corpus.p = std::stoi(need("p"));
    corpus.n = std::stoi(need("n"));
    corpus.seed = std::stoull(need("seed"));
    const int count = std::stoi(need("count"));
    corpus.items.reserve(static_cast<std::size_t>(count));

    const auto dir = manifest_path.parent_path();
    std::stringstream shards(need("shards"));
    std::string name;
    const std::size_t cells = static_cast<std::size_t>(corpus.p) * corpus.p;
    while (std::getline(shards, name, ',')) {
        const auto shard_path = dir / name;
        std::ifstream in(shard_path, std::ios::binary);
        if (!in) throw DataError("cannot open " + shard_path.string());
        char magic[8];
        in.read(magic, sizeof(magic));
        if (!in || std::memcmp(magic, kShardMagic, sizeof(magic)) != 0)
            throw DataError(shard_path.string() + ": not a corpus shard");
        const auto shard_count = read_u32(in, shard_path.string());
        const auto shard_p = read_u32(in, shard_path.string());
        if (static_cast<int>(shard_p) != corpus.p)
            throw DataError(shard_path.string() + ": p differs from manifest");
        for (std::uint32_t k = 0; k < shard_count; ++k) {
            StoredPair item;
            item.feature.resize(cells);
            item.label.resize(cells);
            in.read(reinterpret_cast<char*>(item.feature.data()),
                    static_cast<std::streamsize>(cells * sizeof(float)));
            in.read(reinterpret_cast<char*>(item.label.data()),
                    static_cast<std::streamsize>(cells));
            if (!in) throw DataError(shard_path.string() + ": truncated shard");
            corpus.items.push_back(std::move(item));
        }
    }
    if (static_cast<int>(corpus.items.size()) != count)
        throw DataError(manifest_path.string() + ": shard contents disagree with count");
    return corpus;
}

std::uint64_t bytes_fnv1a(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t file_fnv1a(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::uint64_t h = 0xCBF29CE484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const auto got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ULL;
        }
        if (!in) break;
    }
    return h;
}

std::uint64_t manifest_hash(const std::filesystem::path& manifest_or_dir) {
    return file_fnv1a(resolve_manifest(manifest_or_dir));
}

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace sldisco::corpus
