// dcg-lab: command-line driver for the projection-head lab.

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dcglab/binary_io.hpp"
#include "dcglab/dataset.hpp"
#include "dcglab/eval.hpp"
#include "dcglab/kernels.hpp"
#include "dcglab/synthgen.hpp"
#include "dcglab/trainer.hpp"
#include "dcglab/viz.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dcglab;

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
    const char* env = std::getenv("DCG_LAB_SEED");
    if (env == nullptr || *env == '\0') return kDefaultSeed;
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw UsageError("DCG_LAB_SEED must be a non-negative integer, got '" + std::string(s) + "'");
    }
    return v;
}

void print_error(const std::string& kind, const std::string& message) {
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

struct Globals {
    std::uint64_t seed = kDefaultSeed;
    int threads = 1;
};

/// Every effective setting of the invoked subcommand, for output metadata.
json run_echo(const CLI::App& sub, const Globals& g) {
    json options = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help") continue;
        if (opt->get_expected_min() == 0) {
            options[name] = opt->count() > 0;
            continue;
        }
        const auto& results = opt->results();
        if (!results.empty()) {
            options[name] = opt->get_items_expected_max() > 1 ? json(results) : json(results.back());
        } else if (!opt->get_default_str().empty()) {
            options[name] = opt->get_default_str();
        } else {
            options[name] = nullptr;
        }
    }
    return json{{"tool", "dcg-lab"}, {"subcommand", sub.get_name()}, {"seed", g.seed},
                {"threads", g.threads}, {"options", options}};
}

void write_json(const fs::path& path, const json& j) { io::write_text_file(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
    const auto bytes = io::read_file(path);
    try {
        return json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        throw FormatError(path.string() + ": invalid JSON: " + e.what());
    }
}

fs::path normalized(const fs::path& p) { return fs::weakly_canonical(fs::absolute(p)); }

/// Inputs must exist and no output may alias an input.
void check_paths(const std::vector<fs::path>& inputs, const std::vector<fs::path>& outputs) {
    for (const auto& in : inputs) {
        if (!fs::exists(in)) throw IoError("input not found: " + in.string());
    }
    for (const auto& out : outputs) {
        for (const auto& in : inputs) {
            if (normalized(out) == normalized(in)) {
                throw UsageError("output " + out.string() + " would overwrite input " + in.string());
            }
        }
    }
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        for (std::size_t j = i + 1; j < outputs.size(); ++j) {
            if (normalized(outputs[i]) == normalized(outputs[j])) {
                throw UsageError("output " + outputs[i].string() + " given twice");
            }
        }
    }
}

std::pair<std::string, std::string> split_assignment(const std::string& s, const char* flag) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
        throw UsageError(std::string(flag) + " expects LABEL=VALUE, got '" + s + "'");
    }
    return {s.substr(0, eq), s.substr(eq + 1)};
}

json manifest_summary(const PairSet& s, const fs::path& path) {
    std::map<std::string, std::size_t> datasets;
    std::map<std::string, std::size_t> styles;
    std::map<std::string, std::size_t> langs;
    std::size_t with_text = 0;
    std::size_t min_words = 0;
    std::size_t max_words = 0;
    double total_words = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto& r = s[i];
        ++datasets[r.dataset];
        ++styles[std::string(to_string(r.style))];
        ++langs[std::string(to_string(r.lang))];
        with_text += r.text_raw.has_value();
        min_words = i == 0 ? r.n_words : std::min(min_words, r.n_words);
        max_words = std::max(max_words, r.n_words);
        total_words += static_cast<double>(r.n_words);
    }
    return json{{"path", path.string()},
                {"pairs", s.size()},
                {"dim", s.dim()},
                {"datasets", datasets},
                {"styles", styles},
                {"langs", langs},
                {"n_words", {{"min", min_words},
                             {"max", max_words},
                             {"mean", s.empty() ? 0.0 : total_words / static_cast<double>(s.size())}}},
                {"records_with_text", with_text},
                {"integrity_errors", 0}};
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

// --- subcommands -------------------------------------------------------------

using Action = std::function<void()>;

struct Cli {
    CLI::App app{"Linear CLIP projection heads over frozen embeddings: training, retrieval evaluation and "
                 "descriptive/commentative gap reports.",
                 "dcg-lab"};
    Globals globals;
    Action action;

    json echo(const CLI::App* sub) const { return run_echo(*sub, globals); }
};

void add_filter(Cli& cli) {
    auto* sub = cli.app.add_subcommand("filter", "Keep pairs whose text has at least N words");
    static fs::path in, out;
    static std::size_t min_words = 5;
    sub->add_option("--in", in, "Input manifest directory")->required();
    sub->add_option("--out", out, "Output manifest directory")->required();
    sub->add_option("--min-words", min_words, "Minimum whitespace-separated words")->capture_default_str();
    sub->callback([&cli, sub] {
        cli.action = [&cli, sub] {
            check_paths({in}, {out});
            const PairSet s = load_manifest(in);
            const PairSet kept = filter_min_words(s, min_words).compact();
            save_manifest(kept, out, cli.echo(sub));
            emit({{"kept", kept.size()}, {"dropped", s.size() - kept.size()}, {"out", out.string()}});
        };
    });
}

void add_split(Cli& cli) {
    auto* sub = cli.app.add_subcommand("split", "Seeded disjoint train/val/test split");
    static fs::path in, train_out, val_out, test_out;
    static std::size_t train_n = 0, val_n = 0, test_n = 0;
    sub->add_option("--in", in, "Input manifest directory")->required();
    sub->add_option("--train-out", train_out, "Training manifest directory")->required();
    sub->add_option("--val-out", val_out, "Validation manifest directory")->required();
    sub->add_option("--test-out", test_out, "Test manifest directory");
    sub->add_option("--train-size", train_n, "Training pairs")->required();
    sub->add_option("--val-size", val_n, "Validation pairs")->required();
    sub->add_option("--test-size", test_n, "Test pairs")->capture_default_str();
    sub->callback([&cli, sub] {
        cli.action = [&cli, sub] {
            if (test_n > 0 && test_out.empty()) throw UsageError("--test-size > 0 needs --test-out");
            std::vector<fs::path> outs{train_out, val_out};
            if (!test_out.empty()) outs.push_back(test_out);
            check_paths({in}, outs);
            const auto parts = split(load_manifest(in), train_n, val_n, test_n, cli.globals.seed);
            const json run = cli.echo(sub);
            save_manifest(parts.train.compact(), train_out, run);
            save_manifest(parts.val.compact(), val_out, run);
            if (!test_out.empty()) save_manifest(parts.test.compact(), test_out, run);
            emit({{"train", parts.train.size()}, {"val", parts.val.size()}, {"test", parts.test.size()}});
        };
    });
}

void add_mix(Cli& cli) {
    auto* sub = cli.app.add_subcommand("mix", "Sample a fixed number of pairs from each labelled source");
    static std::vector<std::string> sources, counts;
    static fs::path out;
    sub->add_option("--source", sources, "LABEL=MANIFEST_DIR (repeatable)")->required();
    sub->add_option("--count", counts, "LABEL=N (repeatable; order sets component order)")->required();
    sub->add_option("--out", out, "Output manifest directory")->required();
    sub->callback([&cli, sub] {
        cli.action = [&cli, sub] {
            std::map<std::string, fs::path> source_paths;
            std::vector<fs::path> inputs;
            for (const auto& s : sources) {
                auto [label, path] = split_assignment(s, "--source");
                if (!source_paths.emplace(label, path).second) throw UsageError("source '" + label + "' given twice");
                inputs.emplace_back(path);
            }
            MixSpec spec;
            spec.seed = cli.globals.seed;
            for (const auto& c : counts) {
                auto [label, n] = split_assignment(c, "--count");
                std::size_t v = 0;
                const auto [ptr, ec] = std::from_chars(n.data(), n.data() + n.size(), v);
                if (ec != std::errc{} || ptr != n.data() + n.size()) throw UsageError("bad count '" + n + "'");
                if (!source_paths.contains(label)) throw UsageError("--count for unknown source '" + label + "'");
                spec.components.push_back({label, v});
            }
            check_paths(inputs, {out});
            std::map<std::string, PairSet> loaded;
            for (const auto& [label, path] : source_paths) loaded.emplace(label, load_manifest(path));
            const PairSet m = mix(spec, loaded);
            save_manifest(m, out, cli.echo(sub));
            emit({{"pairs", m.size()}, {"out", out.string()}});
        };
    });
}

void add_train(Cli& cli) {
    auto* sub = cli.app.add_subcommand("train", "Train both projection heads with the contrastive loss");
    static fs::path train_dir, val_dir, out, log_path;
    static TrainConfig cfg;
    static bool no_early_stop = false;
    sub->add_option("--train", train_dir, "Training manifest directory")->required();
    sub->add_option("--val", val_dir, "Validation manifest directory")->required();
    sub->add_option("--out", out, "Checkpoint file")->required();
    sub->add_option("--log", log_path, "Training log JSON (default: <out>.log.json)");
    sub->add_option("--epochs", cfg.epochs, "Maximum epochs")->capture_default_str();
    sub->add_option("--batch", cfg.batch_size, "Batch size")->capture_default_str();
    sub->add_option("--lr", cfg.learning_rate, "Adam learning rate")->capture_default_str();
    sub->add_option("--patience", cfg.patience, "Early-stopping patience in epochs")->capture_default_str();
    sub->add_option("--dim-out", cfg.d_out, "Projection width")->capture_default_str();
    sub->add_flag("--no-early-stop", no_early_stop, "Always run every epoch");
    sub->add_flag("--freeze-logit-scale", cfg.freeze_logit_scale, "Keep the temperature at its initial value");
    sub->callback([&cli, sub] {
        cli.action = [&cli, sub] {
            if (log_path.empty()) log_path = fs::path(out.string() + ".log.json");
            check_paths({train_dir, val_dir}, {out, log_path});
            cfg.early_stopping = !no_early_stop;
            cfg.seed = cli.globals.seed;
            cfg.validate();
            const PairSet tr = load_manifest(train_dir);
            const PairSet va = load_manifest(val_dir);
            auto result = train(tr, va, cfg, [](const EpochStats& s) {
                std::cerr << fmt::format("epoch {:>3}  train {:.6f}  val {:.6f}{}\n", s.epoch, s.train_loss,
                                         s.val_loss, s.improved ? "  *" : "");
            });
            json run = cli.echo(sub);
            run["options"]["log"] = log_path.string();
            result.checkpoint.extra["run"] = run;
            save_checkpoint(result.checkpoint, out);
            json log = to_json(result.log);
            log["config"] = to_json(cfg);
            log["best_val_loss"] = result.checkpoint.best_val_loss;
            log["logit_scale"] = result.checkpoint.projector.logit_scale();
            log["run"] = run;
            write_json(log_path, log);
            emit({{"checkpoint", out.string()},
                  {"log", log_path.string()},
                  {"epochs_run", result.log.train_loss.size()},
                  {"best_epoch", result.log.best_epoch},
                  {"best_val_loss", result.checkpoint.best_val_loss},
                  {"stop_reason", result.log.stop_reason}});
        };
    });
}

void add_eval(Cli& cli) {
    auto* sub = cli.app.add_subcommand("eval", "Recall@k retrieval over seeded populations");
    static fs::path data, checkpoint, out, table_path;
    static EvalConfig cfg;
    static std::string direction = "both";
    static std::string label;
    sub->add_option("--data", data, "Manifest directory to evaluate on")->required();
    sub->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
    sub->add_option("--out", out, "Report JSON")->required();
    sub->add_option("--table", table_path, "Also write the text table here");
    sub->add_option("--label", label, "Row label in the table (default: checkpoint file stem)");
    sub->add_option("--pop", cfg.population_sizes, "Population sizes")->delimiter(',')->capture_default_str();
    sub->add_option("--trials", cfg.trials, "Trials per population")->capture_default_str();
    sub->add_option("--k", cfg.ks, "Recall cut-offs")->delimiter(',')->capture_default_str();
    sub->add_option("--direction", direction, "t2i, i2t or both")
        ->check(CLI::IsMember({"t2i", "i2t", "both"}))
        ->capture_default_str();
    sub->callback([&cli, sub] {
        cli.action = [&cli, sub] {
            std::vector<fs::path> outs{out};
            if (!table_path.empty()) outs.push_back(table_path);
            check_paths({data, checkpoint}, outs);
            cfg.directions = parse_direction_flag(direction);
            cfg.seed = cli.globals.seed;
            cfg.validate();
            const Checkpoint c = load_checkpoint(checkpoint);
            const PairSet s = load_manifest(data);
            RetrievalReport report = run_trials(s, c.projector, cfg);
            report.meta["run"] = cli.echo(sub);
            report.meta["pairs"] = s.size();
            const std::string table =
                format_retrieval_table(report, label.empty() ? checkpoint.stem().string() : label);
            write_json(out, to_json(report));
            if (!table_path.empty()) io::write_text_file(table_path, table);
            std::cout << table;
        };
    });
}

void add_gap(Cli& cli) {
    auto* sub = cli.app.add_subcommand("gap", "Mean true-pair minus false-pair cosine, per dataset tag");
    static fs::path data, checkpoint, out;
    static std::size_t population = 1000, trials = 10;
    sub->add_option("--data", data, "Manifest directory")->required();
    sub->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
    sub->add_option("--out", out, "Report JSON")->required();
    sub->add_option("--pop", population, "Population size")->capture_default_str();
    sub->add_option("--trials", trials, "Trials per dataset tag")->capture_default_str();
    sub->callback([&cli, sub] {
        cli.action = [&cli, sub] {
            check_paths({data, checkpoint}, {out});
            const Checkpoint c = load_checkpoint(checkpoint);
            GapReport report = similarity_gap(load_manifest(data), c.projector, population, trials, cli.globals.seed);
            report.meta["run"] = cli.echo(sub);
            write_json(out, to_json(report));
            std::cout << format_gap_table(report);
        };
    });
}

void add_dcg(Cli& cli) {
    auto* sub = cli.app.add_subcommand("dcg", "Descriptive minus commentative recall, in percentage points");
    static fs::path descriptive, commentative, out;
    sub->add_option("--descriptive", descriptive, "Retrieval report on descriptive captions")->required();
    sub->add_option("--commentative", commentative, "Retrieval report on commentative captions")->required();
    sub->add_option("--out", out, "Report JSON")->required();
    sub->callback([&cli, sub] {
        cli.action = [&cli, sub] {
            check_paths({descriptive, commentative}, {out});
            DcgReport report = dcg_report(retrieval_report_from_json(read_json(descriptive)),
                                          retrieval_report_from_json(read_json(commentative)));
            report.meta["run"] = cli.echo(sub);
            write_json(out, to_json(report));
            std::cout << format_dcg_table(report);
        };
    });
}

void add_query(Cli& cli) {
    auto* sub = cli.app.add_subcommand("query", "Top-k images for the text of one record");
    static fs::path data, checkpoint, out;
    static std::string record;
    static std::size_t k = 5;
    sub->add_option("--data", data, "Manifest directory; its images are the candidates")->required();
    sub->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
    sub->add_option("--record", record, "Record id whose text is the query")->required();
    sub->add_option("--k", k, "Number of hits")->capture_default_str();
    sub->add_option("--out", out, "Also write the hits as JSON here");
    sub->callback([&cli, sub] {
        cli.action = [&cli, sub] {
            check_paths({data, checkpoint}, out.empty() ? std::vector<fs::path>{} : std::vector<fs::path>{out});
            const Checkpoint c = load_checkpoint(checkpoint);
            const PairSet s = load_manifest(data);
            std::optional<std::size_t> pos;
            for (std::size_t i = 0; i < s.size() && !pos; ++i) {
                if (s[i].id == record) pos = i;
            }
            if (!pos) throw ArgumentError("no record with id '" + record + "'");
            const auto hits = query_topk(s.text_embeddings().row(s[*pos].text_row), s, c.projector, k);
            json j{{"query", record}, {"hits", to_json(std::span<const QueryHit>(hits))}, {"run", cli.echo(sub)}};
            if (s[*pos].text_raw) j["query_text"] = *s[*pos].text_raw;
            if (!out.empty()) write_json(out, j);
            emit(j);
        };
    });
}

void add_viz(Cli& cli) {
    auto* sub = cli.app.add_subcommand("viz", "2-D PCA scatter of image and text embeddings as CSV");
    static fs::path data, checkpoint, out;
    static std::size_t limit = 0;
    sub->add_option("--data", data, "Manifest directory")->required();
    sub->add_option("--checkpoint", checkpoint, "Project through these heads first (default: raw embeddings)");
    sub->add_option("--out", out, "CSV file")->required();
    sub->add_option("--limit", limit, "Use only the first N records (0 = all)")->capture_default_str();
    sub->callback([&cli, sub] {
        cli.action = [&cli, sub] {
            std::vector<fs::path> inputs{data};
            if (!checkpoint.empty()) inputs.push_back(checkpoint);
            check_paths(inputs, {out});
            PairSet s = load_manifest(data);
            if (limit > 0 && limit < s.size()) {
                std::vector<std::size_t> first(limit);
                std::iota(first.begin(), first.end(), std::size_t{0});
                s = s.subset(first);
            }
            Matrix images = s.all_images();
            Matrix texts = s.all_texts();
            if (!checkpoint.empty()) {
                const Checkpoint c = load_checkpoint(checkpoint);
                images = project(c.projector.image_head, images);
                texts = project(c.projector.text_head, texts);
            }
            // Texts grouped by caption style, images as one group.
            std::map<std::string, std::vector<std::size_t>> by_style;
            for (std::size_t i = 0; i < s.size(); ++i) {
                const Style st = s[i].style;
                by_style[st == Style::unknown ? "text" : std::string(to_string(st)) + "-text"].push_back(i);
            }
            std::vector<ScatterGroup> groups;
            ScatterGroup img{"image", images, {}};
            for (const auto& r : s.records()) img.ids.push_back(r.id);
            groups.push_back(std::move(img));
            for (const auto& [name, positions] : by_style) {
                ScatterGroup g{name, texts.gather_rows(positions), {}};
                for (const std::size_t p : positions) g.ids.push_back(s[p].id);
                groups.push_back(std::move(g));
            }
            const auto rows = export_scatter(groups, out);
            json counts = json::object();
            for (const auto& g : groups) counts[g.label] = g.points.rows();
            write_json(fs::path(out.string() + ".meta.json"), {{"groups", counts}, {"run", cli.echo(sub)}});
            emit({{"rows", rows.size()}, {"groups", counts}, {"out", out.string()}});
        };
    });
}

void add_synth(Cli& cli) {
    auto* sub = cli.app.add_subcommand("synth", "Generate a synthetic paired set with a known linear alignment");
    static SynthSpec spec;
    static fs::path out, analytic;
    static std::string style = "unknown", lang = "other";
    sub->add_option("--out", out, "Output manifest directory")->required();
    sub->add_option("--pairs", spec.n_pairs, "Number of pairs")->capture_default_str();
    sub->add_option("--latent", spec.latent_dim, "Latent dimension")->capture_default_str();
    sub->add_option("--dim", spec.backbone_dim, "Embedding dimension")->capture_default_str();
    sub->add_option("--noise", spec.noise_sigma, "Gaussian noise sigma")->capture_default_str();
    sub->add_option("--dataset", spec.dataset, "Dataset tag")->capture_default_str();
    sub->add_option("--style", style, "descriptive, commentative or unknown")->capture_default_str();
    sub->add_option("--lang", lang, "Language tag")->capture_default_str();
    sub->add_option("--map-seed", spec.map_seed, "Seed of the generating maps; share it across splits")
        ->capture_default_str();
    sub->add_option("--analytic-checkpoint", analytic, "Also write a checkpoint holding the generating maps");
    sub->callback([&cli, sub] {
        cli.action = [&cli, sub] {
            spec.seed = cli.globals.seed;
            spec.style = parse_style(style);
            spec.lang = parse_lang(lang);
            spec.validate();
            std::vector<fs::path> outs{out};
            if (!analytic.empty()) outs.push_back(analytic);
            check_paths({}, outs);
            const SynthData d = generate(spec);
            const json run = cli.echo(sub);
            save_manifest(d.pairs, out, run);
            if (!analytic.empty()) {
                Checkpoint c;
                c.projector = analytic_projector(d);
                c.extra["run"] = run;
                c.extra["analytic"] = true;
                save_checkpoint(c, analytic);
            }
            emit(manifest_summary(d.pairs, out));
        };
    });
}

void add_inspect(Cli& cli) {
    auto* sub = cli.app.add_subcommand("inspect", "Validate a manifest and print a JSON summary");
    static fs::path path;
    sub->add_option("manifest", path, "Manifest directory or manifest.json")->required();
    sub->callback([&cli] {
        cli.action = [] {
            check_paths({path}, {});
            emit(manifest_summary(load_manifest(path), path));
        };
    });
}

}  // namespace

int main(int argc, char** argv) {
    Cli cli;
    cli.app.require_subcommand(1);
    cli.app.fallthrough();
    cli.app.set_version_flag("--version", "dcg-lab 1.0");
    try {
        cli.globals.seed = default_seed();
    } catch (const UsageError& e) {
        print_error("usage", e.what());
        return 2;
    }
    cli.app.add_option("--seed", cli.globals.seed, "Seed for every random choice (env DCG_LAB_SEED sets the default)")
        ->capture_default_str();
    cli.app.add_option("--threads", cli.globals.threads, "OpenMP threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    add_filter(cli);
    add_split(cli);
    add_mix(cli);
    add_train(cli);
    add_eval(cli);
    add_gap(cli);
    add_dcg(cli);
    add_query(cli);
    add_viz(cli);
    add_synth(cli);
    add_inspect(cli);

    try {
        cli.app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return cli.app.exit(e);
        print_error("usage", e.what());
        return 2;
    }

    try {
        set_num_threads(cli.globals.threads);
        cli.action();
    } catch (const UsageError& e) {
        print_error("usage", e.what());
        return 2;
    } catch (const ArgumentError& e) {
        print_error(e.kind(), e.what());
        return 2;
    } catch (const Error& e) {
        print_error(e.kind(), e.what());
        return 1;
    } catch (const fs::filesystem_error& e) {
        print_error("io", e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
    return 0;
}
