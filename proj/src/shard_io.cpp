#include "corpusforge/shard_io.hpp"

#include <json.hpp>

#include <unordered_set>

#include "corpusforge/error.hpp"

namespace corpusforge {

using nlohmann::json;

namespace {

std::string quoted(const std::string& s) { return json(s).dump(); }

}  // namespace

std::string to_jsonl_line(const Document& doc) {
    std::string line = "{";
    line += "\"id\":" + quoted(doc.id);
    line += ",\"source\":" + quoted(doc.source);
    line += ",\"category\":" + quoted(doc.category);
    line += ",\"lang\":" + quoted(doc.lang);
    line += ",\"text\":" + quoted(doc.text);
    for (const auto& [key, value] : doc.meta) {
        if (key == "line") continue;  // reader bookkeeping, not document data
        line += "," + quoted(key) + ":" + quoted(value);
    }
    line += "}";
    return line;
}

Document from_jsonl_line(const std::string& line, uint64_t line_no, uint64_t byte_offset) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::exception& e) {
        fail_data("line " + std::to_string(line_no) + ": malformed JSON at byte offset " +
                  std::to_string(byte_offset) + ": " + e.what());
    }
    if (!obj.is_object())
        fail_data("line " + std::to_string(line_no) + ": expected a JSON object (byte offset " +
                  std::to_string(byte_offset) + ")");

    auto require = [&](const char* field) -> std::string {
        if (!obj.contains(field))
            fail_data("line " + std::to_string(line_no) + ": missing field " + field);
        if (!obj[field].is_string())
            fail_data("line " + std::to_string(line_no) + ": field " + field + " must be a string");
        return obj[field].get<std::string>();
    };

    Document doc;
    doc.id = require("id");
    doc.source = require("source");
    doc.text = require("text");
    doc.category = obj.value("category", std::string{});
    doc.lang = obj.value("lang", std::string{"other"});
    for (const auto& [key, value] : obj.items()) {
        if (key == "id" || key == "source" || key == "category" || key == "lang" || key == "text")
            continue;
        doc.meta[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
    doc.meta["line"] = std::to_string(line_no);
    validate(doc);
    return doc;
}

ShardReader::ShardReader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) fail_data("cannot open shard: " + path.string());
}

std::optional<Document> ShardReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        const uint64_t offset = byte_offset_;
        byte_offset_ += line.size() + 1;
        ++line_no_;
        if (line.empty()) continue;
        Document doc = from_jsonl_line(line, line_no_, offset);
        auto it = std::lower_bound(seen_ids_.begin(), seen_ids_.end(), doc.id);
        if (it != seen_ids_.end() && *it == doc.id)
            fail_data("duplicate document id '" + doc.id + "' in shard " + path_.string());
        seen_ids_.insert(it, doc.id);
        return doc;
    }
    return std::nullopt;
}

std::vector<Document> read_shard(const std::filesystem::path& path) {
    ShardReader reader(path);
    std::vector<Document> docs;
    while (auto doc = reader.next()) docs.push_back(std::move(*doc));
    return docs;
}

ShardWriter::ShardWriter(const std::filesystem::path& path)
    : path_(path), tmp_path_(path.string() + ".partial") {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    out_.open(tmp_path_, std::ios::binary | std::ios::trunc);
    if (!out_) fail_data("cannot open shard for writing: " + path.string());
}

ShardWriter::~ShardWriter() {
    if (!finished_) {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(tmp_path_, ec);
    }
}

void ShardWriter::add(const Document& doc) {
    validate(doc);
    std::string line = to_jsonl_line(doc);
    line.push_back('\n');
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    checksum_.update(line);
    byte_count_ += line.size();
    ++doc_count_;
    ++per_source_[doc.source];
}

ShardEntry ShardWriter::finish() {
    out_.flush();
    if (!out_) fail_data("write failed for shard: " + path_.string());
    out_.close();
    std::filesystem::rename(tmp_path_, path_);
    finished_ = true;
    return ShardEntry{path_.string(), doc_count_, byte_count_, checksum_.digest()};
}

ShardEntry write_shard(const std::vector<Document>& docs, const std::filesystem::path& path) {
    std::unordered_set<std::string> ids;
    for (const auto& doc : docs) {
        validate(doc);
        if (!ids.insert(doc.id).second) fail_data("duplicate document id '" + doc.id + "'");
    }
    ShardWriter writer(path);
    for (const auto& doc : docs) writer.add(doc);
    return writer.finish();
}

}  // namespace corpusforge
