#include "identik/ingest.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace identik {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

void strip_cr(std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
}

static_assert(std::endian::native == std::endian::little,
              "embedding container I/O assumes a little-endian host");

}  // namespace

std::vector<ImageRecord> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open manifest: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw MalformedHeader("empty manifest: " + path.string());
    strip_cr(line);
    if (line != kManifestHeader)
        throw MalformedHeader("manifest header mismatch, expected \"" +
                              std::string(kManifestHeader) + "\"");

    std::vector<ImageRecord> records;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != 6) throw BadRow(line_no, "expected 6 fields");

        ImageRecord r;
        r.image_id = fields[0];
        r.subject_id = fields[1];
        r.group = {fields[2], fields[3]};
        if (r.image_id.empty()) throw BadRow(line_no, "empty image_id");
        if (r.subject_id.empty()) throw BadRow(line_no, "empty subject_id");
        if (!Date::parse(fields[4], r.capture_date)) throw BadRow(line_no, "invalid date");

        try {
            std::size_t pos = 0;
            long long idx = std::stoll(fields[5], &pos);
            if (pos != fields[5].size() || idx < 0) throw BadRow(line_no, "invalid index");
            r.embedding_index = static_cast<std::size_t>(idx);
        } catch (const BadRow&) {
            throw;
        } catch (...) {
            throw BadRow(line_no, "invalid index");
        }
        records.push_back(std::move(r));
    }
    return records;
}

void write_manifest(const std::vector<ImageRecord>& records,
                    const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot write manifest: " + path.string());
    out << kManifestHeader << "\n";
    for (const auto& r : records) {
        out << r.image_id << ',' << r.subject_id << ',' << r.group.race << ','
            << r.group.gender << ',' << r.capture_date.to_string() << ','
            << r.embedding_index << "\n";
    }
    if (!out) throw IngestError("write failed: " + path.string());
}

EmbeddingStore read_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open embeddings: " + path.string());

    char magic[4];
    std::uint32_t dim = 0;
    std::uint64_t count = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&dim), 4);
    in.read(reinterpret_cast<char*>(&count), 8);
    if (!in || std::memcmp(magic, "EMB1", 4) != 0)
        throw BadMagic("bad embedding file magic: " + path.string());
    if (dim == 0) throw IngestError("embedding dimension 0: " + path.string());

    std::size_t n_floats = static_cast<std::size_t>(dim) * count;
    std::vector<float> data(n_floats);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(n_floats * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != n_floats * sizeof(float))
        throw TruncatedFile("embedding payload shorter than header promise: " +
                            path.string());
    // No trailing bytes allowed either.
    char extra;
    if (in.read(&extra, 1))
        throw TruncatedFile("embedding payload longer than header promise: " +
                            path.string());

    for (std::size_t i = 0; i < data.size(); ++i)
        if (!std::isfinite(data[i])) throw NonFiniteValue(i);

    return EmbeddingStore(dim, std::move(data));
}

void write_embeddings(const EmbeddingStore& store, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot write embeddings: " + path.string());
    std::uint32_t dim = static_cast<std::uint32_t>(store.dimension());
    std::uint64_t count = store.count();
    out.write("EMB1", 4);
    out.write(reinterpret_cast<const char*>(&dim), 4);
    out.write(reinterpret_cast<const char*>(&count), 8);
    out.write(reinterpret_cast<const char*>(store.raw().data()),
              static_cast<std::streamsize>(store.raw().size() * sizeof(float)));
    if (!out) throw IngestError("write failed: " + path.string());
}

}  // namespace identik
