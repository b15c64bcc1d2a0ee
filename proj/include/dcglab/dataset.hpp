#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dcglab/matrix.hpp"

namespace dcglab {

enum class Lang { en, es, pt, uk, ru, other };
enum class Style { descriptive, commentative, unknown };

[[nodiscard]] std::string_view to_string(Lang lang) noexcept;
[[nodiscard]] std::string_view to_string(Style style) noexcept;
/// Throws FormatError on an unrecognised tag.
[[nodiscard]] Lang parse_lang(std::string_view tag);
[[nodiscard]] Style parse_style(std::string_view tag);

struct PairRecord {
    std::string id;
    std::string dataset;
    Lang lang = Lang::other;
    Style style = Style::unknown;
    std::size_t image_row = 0;
    std::size_t text_row = 0;
    std::size_t n_words = 0;
    std::optional<std::string> text_raw;
    /// Fields not known to this version, kept so a rewrite preserves them.
    nlohmann::json extra = nlohmann::json::object();

    friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

/// Aligned image/text backbone embeddings plus per-pair metadata. The
/// embedding matrices are shared, immutable, and referenced by row index;
/// subsets copy records only.
class PairSet {
public:
    PairSet() = default;
    /// Validates ids and row bounds; throws IntegrityError.
    PairSet(std::vector<PairRecord> records, std::shared_ptr<const Matrix> image_embeddings,
            std::shared_ptr<const Matrix> text_embeddings);

    [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
    [[nodiscard]] bool empty() const noexcept { return records_.empty(); }
    [[nodiscard]] std::size_t dim() const noexcept { return images_->cols(); }
    [[nodiscard]] const std::vector<PairRecord>& records() const noexcept { return records_; }
    [[nodiscard]] const PairRecord& operator[](std::size_t i) const { return records_[i]; }
    [[nodiscard]] const Matrix& image_embeddings() const noexcept { return *images_; }
    [[nodiscard]] const Matrix& text_embeddings() const noexcept { return *texts_; }
    [[nodiscard]] std::shared_ptr<const Matrix> shared_image_embeddings() const noexcept { return images_; }
    [[nodiscard]] std::shared_ptr<const Matrix> shared_text_embeddings() const noexcept { return texts_; }

    /// Records at the given positions, in that order, sharing embeddings.
    [[nodiscard]] PairSet subset(std::span<const std::size_t> positions) const;
    /// Copy whose embedding files contain only referenced rows, renumbered.
    [[nodiscard]] PairSet compact() const;

    /// Embedding rows of the records at `positions`, row-aligned.
    [[nodiscard]] Matrix gather_images(std::span<const std::size_t> positions) const;
    [[nodiscard]] Matrix gather_texts(std::span<const std::size_t> positions) const;
    [[nodiscard]] Matrix all_images() const;
    [[nodiscard]] Matrix all_texts() const;

private:
    std::vector<PairRecord> records_;
    std::shared_ptr<const Matrix> images_ = std::make_shared<const Matrix>();
    std::shared_ptr<const Matrix> texts_ = std::make_shared<const Matrix>();
};

// --- on-disk formats -------------------------------------------------------

inline constexpr std::string_view kEmbeddingMagic = "CCLB";
inline constexpr std::uint32_t kEmbeddingVersion = 1;
inline constexpr std::string_view kManifestFileName = "manifest.json";

void write_embedding_file(const std::filesystem::path& path, const Matrix& m);
/// Reads and validates a CCLB file; `expected_dim` of 0 skips the dim check.
[[nodiscard]] Matrix read_embedding_file(const std::filesystem::path& path, std::size_t expected_dim = 0);

[[nodiscard]] nlohmann::ordered_json record_to_json(const PairRecord& r);
/// `line_no` is used in error messages only.
[[nodiscard]] PairRecord record_from_json(const nlohmann::json& j, std::size_t line_no = 0);

/// Writes manifest.json, records.jsonl, images.cclb and texts.cclb into `dir`.
/// A non-null `run` is stored under "run" in manifest.json.
void save_manifest(const PairSet& s, const std::filesystem::path& dir, const nlohmann::json& run = nullptr);
/// Accepts a manifest directory or the manifest file itself.
[[nodiscard]] PairSet load_manifest(const std::filesystem::path& path);

// --- operations ------------------------------------------------------------

/// Number of maximal runs of non-whitespace code points (Unicode White_Space).
[[nodiscard]] std::size_t word_count(std::string_view utf8);

[[nodiscard]] PairSet filter_min_words(const PairSet& s, std::size_t min_words = 5);

struct SplitResult {
    PairSet train;
    PairSet val;
    PairSet test;
};

/// Disjoint seeded draws without replacement.
[[nodiscard]] SplitResult split(const PairSet& s, std::size_t train_n, std::size_t val_n, std::size_t test_n,
                                std::uint64_t seed);

struct MixComponent {
    std::string label;
    std::size_t count = 0;
};

struct MixSpec {
    std::vector<MixComponent> components;
    std::uint64_t seed = 0;
};

/// Per-source seeded samples without replacement, concatenated and then
/// shuffled once globally. The result owns fresh compacted embeddings.
[[nodiscard]] PairSet mix(const MixSpec& spec, const std::map<std::string, PairSet>& sources);

struct Batch {
    std::vector<std::size_t> positions;
    Matrix images;
    Matrix texts;
};

/// Record positions for one epoch, shuffled by (seed, epoch). A trailing
/// batch of size 1 is dropped; smaller-than-full batches of size >= 2 are kept.
[[nodiscard]] std::vector<std::vector<std::size_t>> batch_positions(std::size_t n, std::size_t batch_size,
                                                                    std::uint64_t seed, std::uint64_t epoch);
/// Same grouping rule without shuffling (used for validation).
[[nodiscard]] std::vector<std::vector<std::size_t>> sequential_batch_positions(std::size_t n,
                                                                               std::size_t batch_size);
[[nodiscard]] Batch make_batch(const PairSet& s, std::vector<std::size_t> positions);
[[nodiscard]] std::vector<Batch> batches(const PairSet& s, std::size_t batch_size, std::uint64_t seed,
                                         std::uint64_t epoch);

}  // namespace dcglab
