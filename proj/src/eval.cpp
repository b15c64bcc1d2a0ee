#include "dcglab/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>

#include "dcglab/kernels.hpp"
#include "dcglab/ranking.hpp"
#include "dcglab/rng.hpp"

namespace dcglab {

std::string_view to_string(Direction d) noexcept {
    return d == Direction::text_to_image ? "text_to_image" : "image_to_text";
}

Direction parse_direction(std::string_view s) {
    if (s == "text_to_image" || s == "t2i") return Direction::text_to_image;
    if (s == "image_to_text" || s == "i2t") return Direction::image_to_text;
    throw ArgumentError("unknown direction '" + std::string(s) + "'");
}

std::vector<Direction> parse_direction_flag(std::string_view s) {
    if (s == "both") return {Direction::text_to_image, Direction::image_to_text};
    return {parse_direction(s)};
}

std::string_view to_string(PopulationLayout l) noexcept {
    switch (l) {
        case PopulationLayout::disjoint_global: return "disjoint_global";
        case PopulationLayout::disjoint: return "disjoint";
        case PopulationLayout::independent: return "independent";
    }
    return "independent";
}

void EvalConfig::validate() const {
    if (trials < 1) throw ArgumentError("trials must be >= 1");
    if (population_sizes.empty()) throw ArgumentError("at least one population size is required");
    if (ks.empty()) throw ArgumentError("at least one k is required");
    if (directions.empty()) throw ArgumentError("at least one direction is required");
    for (const std::size_t pop : population_sizes) {
        if (pop < 1) throw ArgumentError("population sizes must be >= 1");
        for (const std::size_t k : ks) {
            if (k < 1 || k > pop) {
                throw ArgumentError("k = " + std::to_string(k) + " is not in [1, " + std::to_string(pop) +
                                    "] for population " + std::to_string(pop));
            }
        }
    }
}

std::vector<TrialPlan> plan_trials(std::size_t n_pairs, const EvalConfig& cfg) {
    if (cfg.trials < 1) throw ArgumentError("trials must be >= 1");
    std::size_t total = 0;
    for (const std::size_t pop : cfg.population_sizes) {
        if (pop > n_pairs) {
            throw SizeError("population " + std::to_string(pop) + " exceeds the " + std::to_string(n_pairs) +
                            " available pairs");
        }
        total += pop * cfg.trials;
    }

    std::vector<TrialPlan> plans;
    if (total <= n_pairs) {
        Rng rng({cfg.seed, 0x6c61796f7574ULL});
        const auto perm = rng.permutation(n_pairs);
        std::size_t cursor = 0;
        for (const std::size_t pop : cfg.population_sizes) {
            TrialPlan plan{pop, PopulationLayout::disjoint_global, {}};
            for (std::size_t t = 0; t < cfg.trials; ++t) {
                plan.trials.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(cursor),
                                         perm.begin() + static_cast<std::ptrdiff_t>(cursor + pop));
                cursor += pop;
            }
            plans.push_back(std::move(plan));
        }
        return plans;
    }

    for (const std::size_t pop : cfg.population_sizes) {
        TrialPlan plan{pop, PopulationLayout::disjoint, {}};
        if (pop * cfg.trials <= n_pairs) {
            Rng rng({cfg.seed, static_cast<std::uint64_t>(pop)});
            const auto perm = rng.permutation(n_pairs);
            for (std::size_t t = 0; t < cfg.trials; ++t) {
                plan.trials.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(t * pop),
                                         perm.begin() + static_cast<std::ptrdiff_t>((t + 1) * pop));
            }
        } else {
            plan.layout = PopulationLayout::independent;
            for (std::size_t t = 0; t < cfg.trials; ++t) {
                Rng rng({cfg.seed, static_cast<std::uint64_t>(pop), static_cast<std::uint64_t>(t)});
                auto perm = rng.permutation(n_pairs);
                perm.resize(pop);
                plan.trials.push_back(std::move(perm));
            }
        }
        plans.push_back(std::move(plan));
    }
    return plans;
}

std::vector<double> recall_at_k(const Matrix& sim, std::span<const std::size_t> ks) {
    if (sim.rows() != sim.cols()) throw ShapeError("recall_at_k: similarity matrix must be square, got " + sim.shape_string());
    const std::size_t n = sim.rows();
    for (const std::size_t k : ks) {
        if (k < 1 || k > n) {
            throw ArgumentError("recall_at_k: k = " + std::to_string(k) + " not in [1, " + std::to_string(n) + "]");
        }
    }
    std::vector<std::size_t> ranks(n);
    for (std::size_t i = 0; i < n; ++i) ranks[i] = rank_of(sim.row(i), i);
    std::vector<double> out;
    out.reserve(ks.size());
    for (const std::size_t k : ks) {
        const auto hits = std::count_if(ranks.begin(), ranks.end(), [k](std::size_t r) { return r < k; });
        out.push_back(static_cast<double>(hits) / static_cast<double>(n));
    }
    return out;
}

std::pair<double, double> mean_and_std(std::span<const double> values) {
    if (values.empty()) return {0.0, 0.0};
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double sq = 0.0;
    for (const double v : values) sq += (v - mean) * (v - mean);
    return {mean, std::sqrt(sq / n)};
}

const RetrievalCell& RetrievalReport::at(Direction d, std::size_t population, std::size_t k) const {
    for (const auto& c : cells) {
        if (c.direction == d && c.population == population && c.k == k) return c;
    }
    throw ArgumentError("report has no cell for " + std::string(to_string(d)) + " pop=" + std::to_string(population) +
                        " k=" + std::to_string(k));
}

RetrievalReport run_trials(const PairSet& s, const DualProjector& p, const EvalConfig& cfg) {
    cfg.validate();
    const auto plans = plan_trials(s.size(), cfg);
    const Matrix images = project(p.image_head, s.all_images());
    const Matrix texts = project(p.text_head, s.all_texts());

    RetrievalReport report;
    report.populations = cfg.population_sizes;
    report.ks = cfg.ks;
    report.directions = cfg.directions;
    report.trials = cfg.trials;
    for (const auto& plan : plans) {
        report.layouts.push_back(plan.layout);
        if (plan.layout == PopulationLayout::independent) {
            const std::string msg = "population " + std::to_string(plan.population) + ": only " +
                                    std::to_string(s.size()) + " pairs for " + std::to_string(cfg.trials) +
                                    " trials; using independent (overlapping) draws";
            std::clog << "warning: " << msg << '\n';
            report.meta["warnings"].push_back(msg);
        }
    }

    for (const Direction d : cfg.directions) {
        const Matrix& queries = d == Direction::text_to_image ? texts : images;
        const Matrix& candidates = d == Direction::text_to_image ? images : texts;
        for (const auto& plan : plans) {
            // per_k[k index][trial]
            std::vector<std::vector<double>> per_k(cfg.ks.size());
            for (const auto& positions : plan.trials) {
                const auto ranks = ranking::omp::diagonal_ranks(queries, candidates, positions);
                for (std::size_t ki = 0; ki < cfg.ks.size(); ++ki) {
                    const std::size_t k = cfg.ks[ki];
                    const auto hits = std::count_if(ranks.begin(), ranks.end(), [k](std::size_t r) { return r < k; });
                    per_k[ki].push_back(static_cast<double>(hits) / static_cast<double>(plan.population));
                }
            }
            for (std::size_t ki = 0; ki < cfg.ks.size(); ++ki) {
                const auto [mean, sd] = mean_and_std(per_k[ki]);
                report.cells.push_back({d, plan.population, cfg.ks[ki], mean, sd, std::move(per_k[ki])});
            }
        }
    }
    return report;
}

double mean_similarity_gap(const Matrix& sim) {
    if (sim.rows() != sim.cols()) throw ShapeError("similarity gap: matrix must be square, got " + sim.shape_string());
    const std::size_t n = sim.rows();
    if (n < 2) throw ArgumentError("similarity gap needs a population of at least 2, got " + std::to_string(n));
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double others = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) others += static_cast<double>(sim(i, j));
        }
        total += static_cast<double>(sim(i, i)) - others / static_cast<double>(n - 1);
    }
    return total / static_cast<double>(n);
}

GapReport similarity_gap(const PairSet& s, const DualProjector& p, std::size_t population, std::size_t trials,
                         std::uint64_t seed) {
    if (population < 2) {
        throw ArgumentError("similarity gap needs a population of at least 2, got " + std::to_string(population));
    }
    if (trials < 1) throw ArgumentError("trials must be >= 1");
    if (population > s.size()) {
        throw SizeError("population " + std::to_string(population) + " exceeds the " + std::to_string(s.size()) +
                        " available pairs");
    }
    std::map<std::string, std::vector<std::size_t>> by_tag;
    for (std::size_t i = 0; i < s.size(); ++i) by_tag[s[i].dataset].push_back(i);

    const Matrix images = project(p.image_head, s.all_images());
    const Matrix texts = project(p.text_head, s.all_texts());

    GapReport report;
    report.population = population;
    report.trials = trials;
    for (const auto& [tag, members] : by_tag) {
        if (members.size() < population) {
            throw SizeError("dataset '" + tag + "' has " + std::to_string(members.size()) +
                            " pairs, fewer than population " + std::to_string(population));
        }
        EvalConfig cfg;
        cfg.population_sizes = {population};
        cfg.trials = trials;
        cfg.seed = seed;
        const TrialPlan plan = plan_trials(members.size(), cfg).front();
        GapEntry entry;
        entry.dataset = tag;
        entry.layout = plan.layout == PopulationLayout::disjoint_global ? PopulationLayout::disjoint : plan.layout;
        for (const auto& local : plan.trials) {
            std::vector<std::size_t> positions(local.size());
            std::transform(local.begin(), local.end(), positions.begin(), [&](std::size_t i) { return members[i]; });
            const auto gaps = ranking::omp::row_gaps(texts, images, positions);
            entry.per_trial.push_back(std::accumulate(gaps.begin(), gaps.end(), 0.0) /
                                      static_cast<double>(gaps.size()));
        }
        entry.mean_gap = mean_and_std(entry.per_trial).first;
        report.entries.push_back(std::move(entry));
    }
    return report;
}

DcgReport dcg_report(const RetrievalReport& descriptive, const RetrievalReport& commentative) {
    if (descriptive.cells.size() != commentative.cells.size()) {
        throw ArgumentError("dcg: reports have different grids (" + std::to_string(descriptive.cells.size()) +
                            " vs " + std::to_string(commentative.cells.size()) + " cells)");
    }
    DcgReport out;
    for (const auto& d : descriptive.cells) {
        const auto match = std::find_if(commentative.cells.begin(), commentative.cells.end(), [&](const auto& c) {
            return c.direction == d.direction && c.population == d.population && c.k == d.k;
        });
        if (match == commentative.cells.end()) {
            throw ArgumentError("dcg: commentative report lacks cell " + std::string(to_string(d.direction)) +
                                " pop=" + std::to_string(d.population) + " k=" + std::to_string(d.k));
        }
        DcgCell cell{d.direction, d.population, d.k, d.mean * 100.0, match->mean * 100.0, 0.0};
        cell.delta_pp = cell.descriptive_pct - cell.commentative_pct;
        out.cells.push_back(cell);
    }
    return out;
}

std::vector<QueryHit> query_topk(std::span<const float> text_embedding, const PairSet& image_set,
                                 const DualProjector& p, std::size_t k) {
    if (k == 0) throw ArgumentError("query: k must be >= 1");
    if (k > image_set.size()) {
        throw ArgumentError("query: k = " + std::to_string(k) + " exceeds the " + std::to_string(image_set.size()) +
                            " candidate images");
    }
    const Matrix query(1, text_embedding.size(), std::vector<float>(text_embedding.begin(), text_embedding.end()));
    const Matrix q = project(p.text_head, query);
    const Matrix images = project(p.image_head, image_set.all_images());
    const Matrix sims = matmul_transposed(q, images);

    std::vector<std::size_t> order(image_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto row = sims.row(0);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) { return row[a] > row[b] || (row[a] == row[b] && a < b); });
    std::vector<QueryHit> hits;
    for (std::size_t i = 0; i < k; ++i) hits.push_back({image_set[order[i]].id, order[i], row[order[i]]});
    return hits;
}

}  // namespace dcglab
