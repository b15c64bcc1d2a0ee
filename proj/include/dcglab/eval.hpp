#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcglab/contrastive.hpp"
#include "dcglab/dataset.hpp"

namespace dcglab {

enum class Direction { text_to_image, image_to_text };

[[nodiscard]] std::string_view to_string(Direction d) noexcept;
[[nodiscard]] Direction parse_direction(std::string_view s);
/// "t2i", "i2t" or "both" (the CLI spelling).
[[nodiscard]] std::vector<Direction> parse_direction_flag(std::string_view s);

/// Retrieval protocol: populations of 100/1,000/10,000 pairs, 10 trials each,
/// recall at 1/5/10/25, both directions.
struct EvalConfig {
    std::vector<std::size_t> population_sizes{100, 1000, 10000};
    std::size_t trials = 10;
    std::vector<std::size_t> ks{1, 5, 10, 25};
    std::vector<Direction> directions{Direction::text_to_image, Direction::image_to_text};
    std::uint64_t seed = 42;

    void validate() const;
};

enum class PopulationLayout {
    disjoint_global,  // every trial of every population size is disjoint from all others
    disjoint,         // trials of this population size are disjoint from each other
    independent,      // independent seeded draws (not enough data for disjointness)
};

[[nodiscard]] std::string_view to_string(PopulationLayout l) noexcept;

struct TrialPlan {
    std::size_t population = 0;
    PopulationLayout layout = PopulationLayout::independent;
    std::vector<std::vector<std::size_t>> trials;  // record positions per trial
};

/// Draws the populations for every (population size, trial). When the set
/// holds trials x sum(population sizes) pairs the whole layout is disjoint;
/// otherwise each size is disjoint across its own trials when it can be,
/// and falls back to independent draws when it cannot.
[[nodiscard]] std::vector<TrialPlan> plan_trials(std::size_t n_pairs, const EvalConfig& cfg);

/// Fraction of rows of a square similarity matrix whose diagonal entry ranks
/// within the top k of its row (ties go to the lower index).
[[nodiscard]] std::vector<double> recall_at_k(const Matrix& sim, std::span<const std::size_t> ks);

struct RetrievalCell {
    Direction direction = Direction::text_to_image;
    std::size_t population = 0;
    std::size_t k = 0;
    double mean = 0.0;
    double std = 0.0;  // population standard deviation across trials
    std::vector<double> per_trial;
};

struct RetrievalReport {
    std::vector<std::size_t> populations;
    std::vector<std::size_t> ks;
    std::vector<Direction> directions;
    std::vector<PopulationLayout> layouts;  // parallel to populations
    std::size_t trials = 0;
    std::vector<RetrievalCell> cells;
    nlohmann::json meta = nlohmann::json::object();

    [[nodiscard]] const RetrievalCell& at(Direction d, std::size_t population, std::size_t k) const;
};

[[nodiscard]] RetrievalReport run_trials(const PairSet& s, const DualProjector& p, const EvalConfig& cfg);

/// Mean and population standard deviation.
[[nodiscard]] std::pair<double, double> mean_and_std(std::span<const double> values);

/// Mean over rows of S[i][i] - mean_{j != i} S[i][j]; rows are text queries.
[[nodiscard]] double mean_similarity_gap(const Matrix& sim);

struct GapEntry {
    std::string dataset;
    double mean_gap = 0.0;
    std::vector<double> per_trial;
    PopulationLayout layout = PopulationLayout::independent;
};

struct GapReport {
    std::size_t population = 0;
    std::size_t trials = 0;
    std::vector<GapEntry> entries;  // sorted by dataset tag
    nlohmann::json meta = nlohmann::json::object();
};

/// Per dataset tag: mean over trials and text queries of the gap between the
/// true pair's cosine and the mean cosine of the false matches.
[[nodiscard]] GapReport similarity_gap(const PairSet& s, const DualProjector& p, std::size_t population,
                                       std::size_t trials, std::uint64_t seed);

struct DcgCell {
    Direction direction = Direction::text_to_image;
    std::size_t population = 0;
    std::size_t k = 0;
    double descriptive_pct = 0.0;
    double commentative_pct = 0.0;
    double delta_pp = 0.0;  // descriptive - commentative
};

struct DcgReport {
    std::vector<DcgCell> cells;
    nlohmann::json meta = nlohmann::json::object();
};

[[nodiscard]] DcgReport dcg_report(const RetrievalReport& descriptive, const RetrievalReport& commentative);

struct QueryHit {
    std::string id;
    std::size_t position = 0;
    float similarity = 0.0F;
};

/// Top-k images of `image_set` for one text backbone embedding, by cosine
/// in the projected space; ties go to the lower position.
[[nodiscard]] std::vector<QueryHit> query_topk(std::span<const float> text_embedding, const PairSet& image_set,
                                               const DualProjector& p, std::size_t k = 5);

// --- serialisation ---------------------------------------------------------

[[nodiscard]] nlohmann::json to_json(const RetrievalReport& r);
[[nodiscard]] RetrievalReport retrieval_report_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const GapReport& r);
[[nodiscard]] nlohmann::json to_json(const DcgReport& r);
[[nodiscard]] nlohmann::json to_json(std::span<const QueryHit> hits);

/// Aligned text table: populations x k columns, one row per direction,
/// cells "mean% ± std".
[[nodiscard]] std::string format_retrieval_table(const RetrievalReport& r, const std::string& label = "model");
[[nodiscard]] std::string format_gap_table(const GapReport& r);
[[nodiscard]] std::string format_dcg_table(const DcgReport& r);

}  // namespace dcglab
