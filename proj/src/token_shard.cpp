#include "corpusforge/token_shard.hpp"

#include <cstring>

#include "corpusforge/error.hpp"

namespace corpusforge {

namespace {

constexpr uint16_t kVersion = 1;

void put_u16(std::string& buf, uint16_t v) {
    for (int i = 0; i < 2; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u32(std::string& buf, uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& buf, uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class ByteReader {
public:
    ByteReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) fail_data("cannot open token shard: " + path.string());
        in_.seekg(0, std::ios::end);
        file_size_ = static_cast<uint64_t>(in_.tellg());
        in_.seekg(0);
    }

    std::string take(size_t n) {
        if (n > bytes_left()) fail_data("truncated token shard: " + path_.string());
        std::string buf(n, '\0');
        in_.read(buf.data(), static_cast<std::streamsize>(n));
        if (static_cast<size_t>(in_.gcount()) != n)
            fail_data("truncated token shard: " + path_.string());
        consumed_ += n;
        checksum_before_ = checksum_;
        checksum_.update(buf);
        return buf;
    }

    uint16_t u16() {
        const std::string b = take(2);
        uint16_t v = 0;
        for (int i = 1; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
        return v;
    }
    uint32_t u32() {
        const std::string b = take(4);
        uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
        return v;
    }
    uint64_t u64() {
        const std::string b = take(8);
        uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
        return v;
    }

    // Checksum of all bytes consumed before the most recent take().
    uint64_t checksum_before_last() const { return checksum_before_.digest(); }
    uint64_t bytes_left() const { return file_size_ - consumed_; }

private:
    std::filesystem::path path_;
    std::ifstream in_;
    uint64_t file_size_ = 0;
    uint64_t consumed_ = 0;
    Fnv1a checksum_;
    Fnv1a checksum_before_;
};

}  // namespace

void write_token_shard(const TokenShard& shard, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".partial";
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail_data("cannot write token shard: " + path.string());

    Fnv1a checksum;
    auto emit = [&](const std::string& buf) {
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        checksum.update(buf);
    };

    std::string header = "CFTD";
    put_u16(header, kVersion);
    put_u32(header, static_cast<uint32_t>(shard.source.size()));
    header += shard.source;
    emit(header);

    for (const auto& doc : shard.docs) {
        std::string rec;
        put_u32(rec, static_cast<uint32_t>(doc.id.size()));
        rec += doc.id;
        put_u64(rec, doc.tokens.size());
        rec.reserve(rec.size() + doc.tokens.size() * 4);
        for (uint32_t t : doc.tokens) put_u32(rec, t);
        emit(rec);
    }

    std::string trailer;
    put_u64(trailer, shard.docs.size());
    put_u64(trailer, checksum.digest());
    out.write(trailer.data(), static_cast<std::streamsize>(trailer.size()));
    out.flush();
    if (!out) fail_data("write failed for token shard: " + path.string());
    out.close();
    std::filesystem::rename(tmp, path);
}

TokenShard read_token_shard(const std::filesystem::path& path) {
    ByteReader in(path);
    if (in.take(4) != "CFTD") fail_data("bad magic in token shard: " + path.string());
    const uint16_t version = in.u16();
    if (version != kVersion)
        fail_data("unsupported token shard version " + std::to_string(version));
    TokenShard shard;
    shard.source = in.take(in.u32());

    while (in.bytes_left() > 16) {
        TokenDoc doc;
        doc.id = in.take(in.u32());
        const uint64_t n = in.u64();
        if (n > in.bytes_left() / 4) fail_data("truncated token shard: " + path.string());
        doc.tokens.reserve(n);
        const std::string raw = in.take(n * 4);
        for (uint64_t i = 0; i < n; ++i) {
            uint32_t v = 0;
            for (int b = 3; b >= 0; --b)
                v = (v << 8) | static_cast<unsigned char>(raw[i * 4 + b]);
            doc.tokens.push_back(v);
        }
        shard.docs.push_back(std::move(doc));
    }
    const uint64_t count = in.u64();
    const uint64_t body_checksum = in.checksum_before_last();
    const uint64_t stored = in.u64();
    if (count != shard.docs.size())
        fail_data("token shard record count mismatch in " + path.string());
    if (stored != body_checksum) fail_data("token shard checksum mismatch in " + path.string());
    return shard;
}

PackedShardWriter::PackedShardWriter(const std::filesystem::path& path, uint32_t seq_len)
    : path_(path), tmp_path_(path.string() + ".partial"), seq_len_(seq_len) {
    if (seq_len_ < 2) fail_data("packed sequence length must be >= 2");
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    out_.open(tmp_path_, std::ios::binary | std::ios::trunc);
    if (!out_) fail_data("cannot write packed shard: " + path.string());
    std::string header = "CFTS";
    put_u16(header, kVersion);
    put_u32(header, seq_len_);
    out_.write(header.data(), static_cast<std::streamsize>(header.size()));
    checksum_.update(header);
}

PackedShardWriter::~PackedShardWriter() {
    if (!finished_) {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(tmp_path_, ec);
    }
}

void PackedShardWriter::add(const PackedSequence& seq) {
    if (seq.tokens.size() != seq_len_ || seq.segment_ids.size() != seq_len_)
        fail_data("packed sequence length mismatch: expected " + std::to_string(seq_len_));
    std::string rec;
    rec.reserve(seq_len_ * 6);
    for (uint32_t t : seq.tokens) put_u32(rec, t);
    for (uint16_t s : seq.segment_ids) put_u16(rec, s);
    out_.write(rec.data(), static_cast<std::streamsize>(rec.size()));
    checksum_.update(rec);
    ++records_;
}

uint64_t PackedShardWriter::finish() {
    std::string trailer;
    put_u64(trailer, records_);
    put_u64(trailer, checksum_.digest());
    out_.write(trailer.data(), static_cast<std::streamsize>(trailer.size()));
    out_.flush();
    if (!out_) fail_data("write failed for packed shard: " + path_.string());
    out_.close();
    std::filesystem::rename(tmp_path_, path_);
    finished_ = true;
    return records_;
}

PackedShard read_packed_shard(const std::filesystem::path& path) {
    ByteReader in(path);
    if (in.take(4) != "CFTS") fail_data("bad magic in packed shard: " + path.string());
    const uint16_t version = in.u16();
    if (version != kVersion)
        fail_data("unsupported packed shard version " + std::to_string(version));
    PackedShard shard;
    shard.seq_len = in.u32();
    if (shard.seq_len < 2) fail_data("invalid sequence length in " + path.string());

    const uint64_t record_size = static_cast<uint64_t>(shard.seq_len) * 6;
    while (in.bytes_left() > 16) {
        if (in.bytes_left() < record_size + 16)
            fail_data("truncated packed shard: " + path.string());
        PackedSequence seq;
        seq.tokens.reserve(shard.seq_len);
        seq.segment_ids.reserve(shard.seq_len);
        const std::string raw = in.take(record_size);
        for (uint32_t i = 0; i < shard.seq_len; ++i) {
            uint32_t v = 0;
            for (int b = 3; b >= 0; --b) v = (v << 8) | static_cast<unsigned char>(raw[i * 4 + b]);
            seq.tokens.push_back(v);
        }
        const size_t seg_base = static_cast<size_t>(shard.seq_len) * 4;
        for (uint32_t i = 0; i < shard.seq_len; ++i) {
            uint16_t v = 0;
            for (int b = 1; b >= 0; --b)
                v = static_cast<uint16_t>((v << 8) | static_cast<unsigned char>(raw[seg_base + i * 2 + b]));
            seq.segment_ids.push_back(v);
        }
        seq.pad_start = shard.seq_len;
        shard.sequences.push_back(std::move(seq));
    }
    const uint64_t count = in.u64();
    const uint64_t body_checksum = in.checksum_before_last();
    const uint64_t stored = in.u64();
    if (count != shard.sequences.size())
        fail_data("packed shard record count mismatch in " + path.string());
    if (stored != body_checksum) fail_data("packed shard checksum mismatch in " + path.string());
    return shard;
}

}  // namespace corpusforge
