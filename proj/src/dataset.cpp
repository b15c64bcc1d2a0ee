#include "dcglab/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "dcglab/binary_io.hpp"
#include "dcglab/rng.hpp"

namespace dcglab {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Lang lang) noexcept {
    switch (lang) {
        case Lang::en: return "en";
        case Lang::es: return "es";
        case Lang::pt: return "pt";
        case Lang::uk: return "uk";
        case Lang::ru: return "ru";
        case Lang::other: return "other";
    }
    return "other";
}

std::string_view to_string(Style style) noexcept {
    switch (style) {
        case Style::descriptive: return "descriptive";
        case Style::commentative: return "commentative";
        case Style::unknown: return "unknown";
    }
    return "unknown";
}

Lang parse_lang(std::string_view tag) {
    for (const Lang l : {Lang::en, Lang::es, Lang::pt, Lang::uk, Lang::ru, Lang::other}) {
        if (to_string(l) == tag) return l;
    }
    throw FormatError("unknown lang tag '" + std::string(tag) + "'");
}

Style parse_style(std::string_view tag) {
    for (const Style s : {Style::descriptive, Style::commentative, Style::unknown}) {
        if (to_string(s) == tag) return s;
    }
    throw FormatError("unknown style tag '" + std::string(tag) + "'");
}

// --- PairSet ---------------------------------------------------------------

PairSet::PairSet(std::vector<PairRecord> records, std::shared_ptr<const Matrix> image_embeddings,
                 std::shared_ptr<const Matrix> text_embeddings)
    : records_(std::move(records)), images_(std::move(image_embeddings)), texts_(std::move(text_embeddings)) {
    if (!images_ || !texts_) throw ArgumentError("PairSet: null embedding matrix");
    if (images_->cols() != texts_->cols()) {
        throw FormatError("PairSet: image dim " + std::to_string(images_->cols()) + " != text dim " +
                          std::to_string(texts_->cols()));
    }
    std::unordered_set<std::string_view> seen;
    seen.reserve(records_.size());
    for (const auto& r : records_) {
        if (!seen.insert(r.id).second) throw IntegrityError("duplicate record id '" + r.id + "'");
        if (r.image_row >= images_->rows()) {
            throw IntegrityError("record '" + r.id + "': image_row " + std::to_string(r.image_row) +
                                 " out of bounds for " + std::to_string(images_->rows()) + " image rows");
        }
        if (r.text_row >= texts_->rows()) {
            throw IntegrityError("record '" + r.id + "': text_row " + std::to_string(r.text_row) +
                                 " out of bounds for " + std::to_string(texts_->rows()) + " text rows");
        }
    }
}

PairSet PairSet::subset(std::span<const std::size_t> positions) const {
    PairSet out;
    out.records_.reserve(positions.size());
    for (const std::size_t p : positions) out.records_.push_back(records_.at(p));
    out.images_ = images_;
    out.texts_ = texts_;
    return out;
}

PairSet PairSet::compact() const {
    std::vector<PairRecord> recs = records_;
    std::unordered_map<std::size_t, std::size_t> image_map;
    std::unordered_map<std::size_t, std::size_t> text_map;
    std::vector<std::size_t> image_rows;
    std::vector<std::size_t> text_rows;
    for (auto& r : recs) {
        auto [it_i, new_i] = image_map.try_emplace(r.image_row, image_rows.size());
        if (new_i) image_rows.push_back(r.image_row);
        r.image_row = it_i->second;
        auto [it_t, new_t] = text_map.try_emplace(r.text_row, text_rows.size());
        if (new_t) text_rows.push_back(r.text_row);
        r.text_row = it_t->second;
    }
    auto images = std::make_shared<const Matrix>(images_->gather_rows(image_rows));
    auto texts = std::make_shared<const Matrix>(texts_->gather_rows(text_rows));
    return PairSet(std::move(recs), std::move(images), std::move(texts));
}

Matrix PairSet::gather_images(std::span<const std::size_t> positions) const {
    Matrix out(positions.size(), images_->cols());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const auto src = images_->row(records_.at(positions[i]).image_row);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

Matrix PairSet::gather_texts(std::span<const std::size_t> positions) const {
    Matrix out(positions.size(), texts_->cols());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const auto src = texts_->row(records_.at(positions[i]).text_row);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

Matrix PairSet::all_images() const {
    std::vector<std::size_t> all(records_.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return gather_images(all);
}

Matrix PairSet::all_texts() const {
    std::vector<std::size_t> all(records_.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return gather_texts(all);
}

// --- embedding files -------------------------------------------------------

void write_embedding_file(const fs::path& path, const Matrix& m) {
    io::ByteWriter w;
    w.bytes(kEmbeddingMagic);
    w.u32(kEmbeddingVersion);
    w.u8(0);  // dtype: float32
    w.u32(static_cast<std::uint32_t>(m.cols()));
    w.u64(m.rows());
    w.f32s(m.data());
    io::write_file(path, w.buffer());
}

Matrix read_embedding_file(const fs::path& path, std::size_t expected_dim) {
    const auto raw = io::read_file(path);
    io::ByteReader r(raw, path.string());
    if (r.bytes(4) != kEmbeddingMagic) throw FormatError(path.string() + ": bad magic (expected CCLB)");
    if (const auto v = r.u32(); v != kEmbeddingVersion) {
        throw FormatError(path.string() + ": unsupported embedding file version " + std::to_string(v));
    }
    if (const auto dtype = r.u8(); dtype != 0) {
        throw FormatError(path.string() + ": unsupported dtype " + std::to_string(dtype));
    }
    const std::size_t dim = r.u32();
    const std::uint64_t count = r.u64();
    if (expected_dim != 0 && dim != expected_dim) {
        throw FormatError(path.string() + ": dim " + std::to_string(dim) + " != declared " +
                          std::to_string(expected_dim));
    }
    if (dim != 0 && count > r.remaining() / 4 / dim) {
        throw FormatError(path.string() + ": truncated (header declares " + std::to_string(count) + " rows of dim " +
                          std::to_string(dim) + ")");
    }
    Matrix m(static_cast<std::size_t>(count), dim);
    r.f32s(m.data());
    if (r.remaining() != 0) {
        throw FormatError(path.string() + ": " + std::to_string(r.remaining()) + " trailing bytes");
    }
    if (!all_finite(m)) throw FormatError(path.string() + ": non-finite embedding values");
    return m;
}

// --- records ---------------------------------------------------------------

namespace {

const std::unordered_set<std::string_view> kKnownFields = {"id",       "dataset",  "lang",    "style",
                                                           "image_row", "text_row", "n_words", "text_raw"};

template <typename T>
T required(const json& j, const char* key, std::size_t line_no) {
    const auto it = j.find(key);
    if (it == j.end()) {
        throw FormatError("record line " + std::to_string(line_no) + ": missing field '" + key + "'");
    }
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw FormatError("record line " + std::to_string(line_no) + ": field '" + key + "' has the wrong type");
    }
}

}  // namespace

ordered_json record_to_json(const PairRecord& r) {
    ordered_json j;
    j["id"] = r.id;
    j["dataset"] = r.dataset;
    j["lang"] = to_string(r.lang);
    j["style"] = to_string(r.style);
    j["image_row"] = r.image_row;
    j["text_row"] = r.text_row;
    j["n_words"] = r.n_words;
    if (r.text_raw) j["text_raw"] = *r.text_raw;
    for (const auto& [key, value] : r.extra.items()) j[key] = value;
    return j;
}

PairRecord record_from_json(const json& j, std::size_t line_no) {
    if (!j.is_object()) throw FormatError("record line " + std::to_string(line_no) + ": not a JSON object");
    PairRecord r;
    r.id = required<std::string>(j, "id", line_no);
    r.dataset = required<std::string>(j, "dataset", line_no);
    r.lang = parse_lang(required<std::string>(j, "lang", line_no));
    r.style = parse_style(required<std::string>(j, "style", line_no));
    r.image_row = required<std::size_t>(j, "image_row", line_no);
    r.text_row = required<std::size_t>(j, "text_row", line_no);
    if (const auto it = j.find("text_raw"); it != j.end() && !it->is_null()) {
        r.text_raw = required<std::string>(j, "text_raw", line_no);
    }
    if (j.contains("n_words")) {
        r.n_words = required<std::size_t>(j, "n_words", line_no);
        if (r.text_raw && word_count(*r.text_raw) != r.n_words) {
            throw IntegrityError("record '" + r.id + "': n_words " + std::to_string(r.n_words) +
                                 " disagrees with text_raw (" + std::to_string(word_count(*r.text_raw)) + " words)");
        }
    } else if (r.text_raw) {
        r.n_words = word_count(*r.text_raw);
    } else {
        throw FormatError("record line " + std::to_string(line_no) + ": missing field 'n_words'");
    }
    for (const auto& [key, value] : j.items()) {
        if (!kKnownFields.contains(key)) r.extra[key] = value;
    }
    return r;
}

// --- manifests -------------------------------------------------------------

void save_manifest(const PairSet& s, const fs::path& dir, const json& run) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    ordered_json manifest;
    manifest["format"] = "dcg-lab-manifest";
    manifest["version"] = 1;
    manifest["dim"] = s.dim();
    manifest["records"] = "records.jsonl";
    manifest["image_embeddings"] = "images.cclb";
    manifest["text_embeddings"] = "texts.cclb";
    if (!run.is_null()) manifest["run"] = run;

    std::string lines;
    for (const auto& r : s.records()) {
        lines += record_to_json(r).dump();
        lines += '\n';
    }
    io::write_text_file(dir / "records.jsonl", lines);
    write_embedding_file(dir / "images.cclb", s.image_embeddings());
    write_embedding_file(dir / "texts.cclb", s.text_embeddings());
    io::write_text_file(dir / kManifestFileName, manifest.dump(2) + "\n");
}

PairSet load_manifest(const fs::path& path) {
    const fs::path manifest_path = fs::is_directory(path) ? path / kManifestFileName : path;
    const fs::path base = manifest_path.parent_path();
    const auto raw = io::read_file(manifest_path);
    json manifest;
    try {
        manifest = json::parse(raw.begin(), raw.end());
    } catch (const json::parse_error& e) {
        throw FormatError(manifest_path.string() + ": invalid JSON: " + e.what());
    }
    auto field = [&](const char* key) -> const json& {
        if (!manifest.is_object() || !manifest.contains(key)) {
            throw FormatError(manifest_path.string() + ": missing manifest field '" + key + "'");
        }
        return manifest.at(key);
    };
    if (manifest.contains("version") && manifest.at("version") != 1) {
        throw FormatError(manifest_path.string() + ": unsupported manifest version " + manifest.at("version").dump());
    }
    const json& dim_field = field("dim");
    if (!dim_field.is_number_unsigned() || dim_field.get<std::size_t>() == 0) {
        throw FormatError(manifest_path.string() + ": 'dim' must be a positive integer");
    }
    const auto dim = dim_field.get<std::size_t>();
    auto rel = [&](const char* key) {
        const json& f = field(key);
        if (!f.is_string()) throw FormatError(manifest_path.string() + ": '" + key + "' must be a string");
        return base / f.get<std::string>();
    };

    auto images = std::make_shared<const Matrix>(read_embedding_file(rel("image_embeddings"), dim));
    auto texts = std::make_shared<const Matrix>(read_embedding_file(rel("text_embeddings"), dim));

    std::ifstream in(rel("records"));
    if (!in) throw IoError("cannot open " + rel("records").string());
    std::vector<PairRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw FormatError("record line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
        }
        records.push_back(record_from_json(j, line_no));
    }
    return PairSet(std::move(records), std::move(images), std::move(texts));
}

// --- operations ------------------------------------------------------------

namespace {

bool is_unicode_whitespace(char32_t c) {
    return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
           (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F ||
           c == 0x3000;
}

// Decodes one code point; malformed bytes decode to U+FFFD and consume one byte.
char32_t next_code_point(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = 0xFFFD;
    if (b0 < 0x80) {
        cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + len > s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += len;
    return cp;
}

}  // namespace

std::size_t word_count(std::string_view utf8) {
    std::size_t words = 0;
    bool in_word = false;
    for (std::size_t i = 0; i < utf8.size();) {
        const bool space = is_unicode_whitespace(next_code_point(utf8, i));
        if (!space && !in_word) ++words;
        in_word = !space;
    }
    return words;
}

PairSet filter_min_words(const PairSet& s, std::size_t min_words) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].n_words >= min_words) keep.push_back(i);
    }
    return s.subset(keep);
}

SplitResult split(const PairSet& s, std::size_t train_n, std::size_t val_n, std::size_t test_n, std::uint64_t seed) {
    const std::size_t needed = train_n + val_n + test_n;
    if (needed > s.size()) {
        throw SizeError("split: requested " + std::to_string(needed) + " pairs (" + std::to_string(train_n) + "+" +
                        std::to_string(val_n) + "+" + std::to_string(test_n) + ") but only " +
                        std::to_string(s.size()) + " available");
    }
    Rng rng(seed);
    const auto perm = rng.permutation(s.size());
    const std::span<const std::size_t> all(perm);
    return {s.subset(all.subspan(0, train_n)), s.subset(all.subspan(train_n, val_n)),
            s.subset(all.subspan(train_n + val_n, test_n))};
}

PairSet mix(const MixSpec& spec, const std::map<std::string, PairSet>& sources) {
    std::size_t dim = 0;
    std::vector<PairRecord> records;
    std::vector<float> image_data;
    std::vector<float> text_data;
    for (std::size_t c = 0; c < spec.components.size(); ++c) {
        const auto& comp = spec.components[c];
        const auto it = sources.find(comp.label);
        if (it == sources.end()) throw ArgumentError("mix: no source labelled '" + comp.label + "'");
        const PairSet& src = it->second;
        if (comp.count > src.size()) {
            throw SizeError("mix: source '" + comp.label + "' requested " + std::to_string(comp.count) +
                            " pairs but only " + std::to_string(src.size()) + " available");
        }
        if (comp.count == 0) continue;
        if (dim == 0) {
            dim = src.dim();
        } else if (src.dim() != dim) {
            throw ShapeError("mix: source '" + comp.label + "' has dim " + std::to_string(src.dim()) +
                             ", expected " + std::to_string(dim));
        }
        Rng rng({spec.seed, static_cast<std::uint64_t>(c)});
        auto perm = rng.permutation(src.size());
        perm.resize(comp.count);
        for (const std::size_t p : perm) {
            PairRecord r = src[p];
            const auto img = src.image_embeddings().row(r.image_row);
            const auto txt = src.text_embeddings().row(r.text_row);
            r.image_row = records.size();
            r.text_row = records.size();
            image_data.insert(image_data.end(), img.begin(), img.end());
            text_data.insert(text_data.end(), txt.begin(), txt.end());
            records.push_back(std::move(r));
        }
    }
    Rng global({spec.seed, ~std::uint64_t{0}});
    global.shuffle(std::span<PairRecord>(records));
    const std::size_t n = records.size();
    auto images = std::make_shared<const Matrix>(n, dim, std::move(image_data));
    auto texts = std::make_shared<const Matrix>(n, dim, std::move(text_data));
    return PairSet(std::move(records), std::move(images), std::move(texts));
}

namespace {

std::vector<std::vector<std::size_t>> chunk(const std::vector<std::size_t>& order, std::size_t batch_size) {
    if (batch_size < 2) {
        throw ArgumentError("batch size must be >= 2, got " + std::to_string(batch_size));
    }
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const std::size_t end = std::min(order.size(), start + batch_size);
        if (end - start < 2) break;
        out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return out;
}

}  // namespace

std::vector<std::vector<std::size_t>> batch_positions(std::size_t n, std::size_t batch_size, std::uint64_t seed,
                                                      std::uint64_t epoch) {
    if (batch_size < 2) {
        throw ArgumentError("batch size must be >= 2, got " + std::to_string(batch_size));
    }
    Rng rng({seed, epoch});
    return chunk(rng.permutation(n), batch_size);
}

std::vector<std::vector<std::size_t>> sequential_batch_positions(std::size_t n, std::size_t batch_size) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    return chunk(order, batch_size);
}

Batch make_batch(const PairSet& s, std::vector<std::size_t> positions) {
    Batch b;
    b.images = s.gather_images(positions);
    b.texts = s.gather_texts(positions);
    b.positions = std::move(positions);
    return b;
}

std::vector<Batch> batches(const PairSet& s, std::size_t batch_size, std::uint64_t seed, std::uint64_t epoch) {
    std::vector<Batch> out;
    for (auto& positions : batch_positions(s.size(), batch_size, seed, epoch)) {
        out.push_back(make_batch(s, std::move(positions)));
    }
    return out;
}

}  // namespace dcglab
