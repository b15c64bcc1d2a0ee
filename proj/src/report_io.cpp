#include <fmt/format.h>

#include <map>

#include "dcglab/eval.hpp"

namespace dcglab {

using nlohmann::json;

namespace {

std::string thousands(std::size_t n) {
    std::string digits = std::to_string(n);
    for (int i = static_cast<int>(digits.size()) - 3; i > 0; i -= 3) digits.insert(static_cast<std::size_t>(i), ",");
    return digits;
}

PopulationLayout parse_layout(std::string_view s) {
    for (const auto l : {PopulationLayout::disjoint_global, PopulationLayout::disjoint, PopulationLayout::independent}) {
        if (to_string(l) == s) return l;
    }
    throw FormatError("unknown population layout '" + std::string(s) + "'");
}

}  // namespace

json to_json(const RetrievalReport& r) {
    json j;
    j["populations"] = r.populations;
    j["ks"] = r.ks;
    j["trials"] = r.trials;
    j["directions"] = json::array();
    for (const auto d : r.directions) j["directions"].push_back(to_string(d));
    j["layouts"] = json::object();
    for (std::size_t i = 0; i < r.layouts.size() && i < r.populations.size(); ++i) {
        j["layouts"][std::to_string(r.populations[i])] = to_string(r.layouts[i]);
    }
    j["cells"] = json::array();
    for (const auto& c : r.cells) {
        j["cells"].push_back({{"direction", to_string(c.direction)},
                              {"population", c.population},
                              {"k", c.k},
                              {"mean", c.mean},
                              {"std", c.std},
                              {"per_trial", c.per_trial}});
    }
    j["meta"] = r.meta;
    return j;
}

RetrievalReport retrieval_report_from_json(const json& j) {
    try {
        RetrievalReport r;
        r.populations = j.at("populations").get<std::vector<std::size_t>>();
        r.ks = j.at("ks").get<std::vector<std::size_t>>();
        r.trials = j.value("trials", std::size_t{0});
        for (const auto& d : j.at("directions")) r.directions.push_back(parse_direction(d.get<std::string>()));
        if (j.contains("layouts")) {
            for (const std::size_t pop : r.populations) {
                const auto key = std::to_string(pop);
                r.layouts.push_back(j.at("layouts").contains(key)
                                        ? parse_layout(j.at("layouts").at(key).get<std::string>())
                                        : PopulationLayout::independent);
            }
        }
        for (const auto& c : j.at("cells")) {
            RetrievalCell cell;
            cell.direction = parse_direction(c.at("direction").get<std::string>());
            cell.population = c.at("population").get<std::size_t>();
            cell.k = c.at("k").get<std::size_t>();
            cell.mean = c.at("mean").get<double>();
            cell.std = c.value("std", 0.0);
            if (c.contains("per_trial")) cell.per_trial = c.at("per_trial").get<std::vector<double>>();
            if (!(cell.mean >= 0.0 && cell.mean <= 1.0) || !(cell.std >= 0.0)) {
                throw FormatError("report cell mean must lie in [0, 1] and std must be >= 0");
            }
            r.cells.push_back(std::move(cell));
        }
        r.meta = j.value("meta", json::object());
        return r;
    } catch (const json::exception& e) {
        throw FormatError(std::string("retrieval report: ") + e.what());
    }
}

json to_json(const GapReport& r) {
    json j;
    j["population"] = r.population;
    j["trials"] = r.trials;
    j["datasets"] = json::array();
    for (const auto& e : r.entries) {
        j["datasets"].push_back(
            {{"dataset", e.dataset}, {"mean_gap", e.mean_gap}, {"per_trial", e.per_trial}, {"layout", to_string(e.layout)}});
    }
    j["meta"] = r.meta;
    return j;
}

json to_json(const DcgReport& r) {
    json j;
    j["cells"] = json::array();
    for (const auto& c : r.cells) {
        j["cells"].push_back({{"direction", to_string(c.direction)},
                              {"population", c.population},
                              {"k", c.k},
                              {"descriptive_pct", c.descriptive_pct},
                              {"commentative_pct", c.commentative_pct},
                              {"delta_pp", c.delta_pp}});
    }
    j["meta"] = r.meta;
    return j;
}

json to_json(std::span<const QueryHit> hits) {
    json j = json::array();
    for (std::size_t i = 0; i < hits.size(); ++i) {
        j.push_back({{"rank", i + 1}, {"id", hits[i].id}, {"position", hits[i].position},
                     {"similarity", hits[i].similarity}});
    }
    return j;
}

std::string format_retrieval_table(const RetrievalReport& r, const std::string& label) {
    constexpr std::size_t cell_w = 16;
    const std::size_t label_w = std::max<std::size_t>(label.size(), 16);
    const std::size_t group_w = r.ks.size() * (cell_w + 3) - 3;
    std::string out;
    for (const Direction d : r.directions) {
        out += fmt::format("Retrieval accuracy ({}), {} trials\n", to_string(d), r.trials);
        out += fmt::format("{:<{}}", "", label_w);
        for (const std::size_t pop : r.populations) out += fmt::format(" | {:^{}}", "Pop=" + thousands(pop), group_w);
        out += "\n";
        out += fmt::format("{:<{}}", "", label_w);
        for (std::size_t p = 0; p < r.populations.size(); ++p) {
            for (const std::size_t k : r.ks) out += fmt::format(" | {:^{}}", "@" + std::to_string(k), cell_w);
        }
        out += "\n";
        out += std::string(label_w + r.populations.size() * (group_w + 3), '-') + "\n";
        out += fmt::format("{:<{}}", label, label_w);
        for (const std::size_t pop : r.populations) {
            for (const std::size_t k : r.ks) {
                const auto& c = r.at(d, pop, k);
                out += fmt::format(" | {:>{}}", fmt::format("{:.2f}% ± {:.2f}", c.mean * 100.0, c.std * 100.0), cell_w);
            }
        }
        out += "\n\n";
    }
    return out;
}

std::string format_gap_table(const GapReport& r) {
    std::string out = fmt::format("Similarity gap (true pair minus mean false match), population {}, {} trials\n",
                                  thousands(r.population), r.trials);
    for (const auto& e : r.entries) out += fmt::format("{:<24} {:.4f}\n", e.dataset, e.mean_gap);
    return out;
}

std::string format_dcg_table(const DcgReport& r) {
    std::string out = fmt::format("{:<14} {:>10} {:>5} {:>14} {:>14} {:>10}\n", "direction", "population", "k",
                                  "descriptive%", "commentative%", "delta pp");
    for (const auto& c : r.cells) {
        out += fmt::format("{:<14} {:>10} {:>5} {:>14.2f} {:>14.2f} {:>10.2f}\n", to_string(c.direction),
                           thousands(c.population), "@" + std::to_string(c.k), c.descriptive_pct,
                           c.commentative_pct, c.delta_pp);
    }
    return out;
}

}  // namespace dcglab
