#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dcglab/trainer.hpp"
#include "test_util.hpp"

using nlohmann::json;
using dcglab::testing::TempDir;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    TempDir dir;

    CliRun run(const std::string& args, const std::string& env = "") {
        const auto out = dir / "stdout.txt";
        const auto err = dir / "stderr.txt";
        const std::string cmd = "cd '" + dir.path().string() + "' && " + env + " '" DCGLAB_CLI_PATH "' " + args +
                                " > '" + out.string() + "' 2> '" + err.string() + "'";
        const int status = std::system(cmd.c_str());
        CliRun r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

    json read(const std::string& rel) { return json::parse(slurp(dir / rel)); }

    void synth(const std::string& out, std::size_t pairs, const std::string& extra = "") {
        const auto r = run("synth --pairs " + std::to_string(pairs) + " --dim 64 --out " + out + " " + extra);
        ASSERT_EQ(r.code, 0) << r.err;
    }
};

void expect_single_line_error(const CliRun& r, const std::string& kind) {
    ASSERT_FALSE(r.err.empty());
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
    const json j = json::parse(r.err);
    EXPECT_EQ(j.at("error"), kind);
    EXPECT_TRUE(j.at("message").is_string());
}

}  // namespace

TEST_F(Cli, SynthThenInspect) {
    ASSERT_EQ(run("synth --pairs 2000 --seed 7 --dim 64 --out m").code, 0);
    const auto r = run("inspect m");
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j.at("pairs"), 2000);
    EXPECT_EQ(j.at("dim"), 64);
    EXPECT_EQ(j.at("integrity_errors"), 0);
    EXPECT_EQ(read("m/manifest.json").at("run").at("seed"), 7);
}

TEST_F(Cli, UsageErrorsExitTwo) {
    auto r = run("frobnicate");
    EXPECT_EQ(r.code, 2);
    expect_single_line_error(r, "usage");
    r = run("inspect m --no-such-flag");
    EXPECT_EQ(r.code, 2);
    expect_single_line_error(r, "usage");
    r = run("eval --data x");
    EXPECT_EQ(r.code, 2);
    r = run("eval --data x --checkpoint y --out z --direction sideways");
    EXPECT_EQ(r.code, 2);
    r = run("inspect m", "DCG_LAB_SEED=abc");
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, DataErrorsExitOne) {
    auto r = run("inspect missing");
    EXPECT_EQ(r.code, 1);
    expect_single_line_error(r, "io");
    synth("m", 10);
    std::ofstream(dir / "m/records.jsonl", std::ios::app)
        << R"({"id":"extra","dataset":"d","lang":"en","style":"unknown","image_row":10,"text_row":0,"n_words":1})"
        << "\n";
    r = run("inspect m");
    EXPECT_EQ(r.code, 1);
    expect_single_line_error(r, "integrity");
}

TEST_F(Cli, RefusesToOverwriteInputs) {
    synth("m", 20);
    const auto r = run("filter --in m --out m");
    EXPECT_EQ(r.code, 2);
    expect_single_line_error(r, "usage");
    EXPECT_EQ(run("inspect m").code, 0);
}

TEST_F(Cli, TrainDefaultsMirrorRecipeAndInputsUntouched) {
    synth("all", 300, "--latent 8");
    ASSERT_EQ(run("split --in all --train-out tr --val-out va --train-size 200 --val-size 100").code, 0);
    const auto before = slurp(dir / "tr/images.cclb") + slurp(dir / "tr/records.jsonl");
    const auto r = run("train --train tr --val va --out m.cckp --epochs 2 --dim-out 16");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(before, slurp(dir / "tr/images.cclb") + slurp(dir / "tr/records.jsonl"));
    const json log = read("m.cckp.log.json");
    EXPECT_EQ(log.at("config").at("batch_size"), 32);
    EXPECT_EQ(log.at("config").at("learning_rate"), 5e-5);
    EXPECT_EQ(log.at("config").at("patience"), 3);
    EXPECT_EQ(log.at("config").at("early_stopping"), true);
    EXPECT_EQ(log.at("config").at("optimizer").at("name"), "adam");
    EXPECT_EQ(log.at("train_loss").size(), 2U);
    EXPECT_EQ(log.at("run").at("options").at("epochs"), "2");
    EXPECT_EQ(log.at("run").at("options").at("log"), "m.cckp.log.json");

    // Same seed, same weights; the run echo differs only by the output name.
    ASSERT_EQ(run("train --train tr --val va --out m2.cckp --epochs 2 --dim-out 16").code, 0);
    const auto a = dcglab::load_checkpoint(dir / "m.cckp");
    const auto b = dcglab::load_checkpoint(dir / "m2.cckp");
    EXPECT_EQ(a.projector, b.projector);
    EXPECT_EQ(a.best_val_loss, b.best_val_loss);
    EXPECT_EQ(read("m.cckp.log.json").at("val_loss"), read("m2.cckp.log.json").at("val_loss"));
}

TEST_F(Cli, EvalGridMatchesTableLayout) {
    synth("big", 10000, "--latent 8 --analytic-checkpoint a.cckp");
    const auto r = run("eval --data big --checkpoint a.cckp --pop 1000 --trials 10 --k 1,5,10,25 --out r.json");
    ASSERT_EQ(r.code, 0) << r.err;
    const json rep = read("r.json");
    EXPECT_EQ(rep.at("populations"), json::array({1000}));
    EXPECT_EQ(rep.at("ks"), json::array({1, 5, 10, 25}));
    EXPECT_EQ(rep.at("trials"), 10);
    EXPECT_EQ(rep.at("cells").size(), 8U);
    EXPECT_EQ(rep.at("layouts"), (json{{"1000", "disjoint_global"}}));
    EXPECT_NE(r.out.find("Pop=1,000"), std::string::npos);
    EXPECT_NE(r.out.find("@25"), std::string::npos);
    EXPECT_EQ(rep.at("meta").at("run").at("seed"), 42);
}

TEST_F(Cli, SeedEnvironmentOnlyChangesTheDefault) {
    synth("all", 100);
    ASSERT_EQ(run("split --in all --train-out a1 --val-out b1 --train-size 50 --val-size 50").code, 0);
    ASSERT_EQ(run("split --in all --train-out a2 --val-out b2 --train-size 50 --val-size 50").code, 0);
    ASSERT_EQ(run("split --in all --train-out a3 --val-out b3 --train-size 50 --val-size 50", "DCG_LAB_SEED=9").code, 0);
    ASSERT_EQ(run("split --seed 42 --in all --train-out a4 --val-out b4 --train-size 50 --val-size 50",
                  "DCG_LAB_SEED=9")
                  .code,
              0);
    EXPECT_EQ(slurp(dir / "a1/records.jsonl"), slurp(dir / "a2/records.jsonl"));
    EXPECT_NE(slurp(dir / "a1/records.jsonl"), slurp(dir / "a3/records.jsonl"));
    EXPECT_EQ(slurp(dir / "a1/records.jsonl"), slurp(dir / "a4/records.jsonl"));
}

TEST_F(Cli, MixGapDcgQueryViz) {
    synth("d", 300, "--style descriptive --dataset coco --analytic-checkpoint a.cckp --map-seed 3");
    synth("c", 300, "--style commentative --dataset tele --seed 5 --map-seed 3");
    auto r = run("mix --source d=d --source c=c --count d=100 --count c=200 --out m");
    ASSERT_EQ(r.code, 0) << r.err;
    const json inspect = json::parse(run("inspect m").out);
    EXPECT_EQ(inspect.at("datasets").at("coco"), 100);
    EXPECT_EQ(inspect.at("datasets").at("tele"), 200);

    r = run("gap --data m --checkpoint a.cckp --pop 50 --trials 2 --out g.json");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read("g.json").at("datasets").size(), 2U);

    ASSERT_EQ(run("eval --data d --checkpoint a.cckp --pop 100 --trials 3 --out rd.json").code, 0);
    ASSERT_EQ(run("eval --data c --checkpoint a.cckp --pop 100 --trials 3 --out rc.json").code, 0);
    r = run("dcg --descriptive rd.json --commentative rc.json --out dcg.json");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read("dcg.json").at("cells").size(), 8U);

    r = run("query --data d --checkpoint a.cckp --record coco-0000004 --k 3");
    ASSERT_EQ(r.code, 0) << r.err;
    const json q = json::parse(r.out);
    EXPECT_EQ(q.at("hits").size(), 3U);
    EXPECT_EQ(q.at("hits").at(0).at("id"), "coco-0000004");
    EXPECT_EQ(run("query --data d --checkpoint a.cckp --record nope").code, 2);

    r = run("viz --data m --out v.csv");
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string csv = slurp(dir / "v.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 600);
    EXPECT_NE(csv.find(",descriptive-text,"), std::string::npos);
    EXPECT_NE(csv.find(",commentative-text,"), std::string::npos);
}
