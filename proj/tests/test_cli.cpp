// End-to-end tests that drive the built binary through std::system, checking
// the documented exit codes: 0 success, 2 usage, 3 data/format, 4 numeric.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "sentistack/sha256.hpp"
#include "support/temp_dir.hpp"
#include "support/toy_corpus.hpp"

using test_support::TempDir;
using test_support::write_file;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;
};

CliResult run_cli(const std::string& args, const std::filesystem::path& out_file) {
    const std::string cmd = std::string(SENTISTACK_CLI_PATH) + " " + args + " > " +
                            out_file.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

struct CliFixture {
    TempDir tmp{"cli"};
    std::filesystem::path tsv, glove, out;

    CliFixture() {
        const auto corpus = test_support::make_toy_corpus(16, 4);
        tsv = tmp / "train.tsv";
        glove = tmp / "glove.txt";
        out = tmp / "out.txt";
        write_file(tsv, test_support::toy_corpus_tsv(corpus));
        write_file(glove, test_support::toy_glove_text(5, 6));
    }

    std::string train_args(const std::string& model, const std::string& dir,
                           unsigned seed = 1) const {
        return "train --model " + model + " --data sst2:" + tsv.string() + " --glove " +
               glove.string() + " --run " + (tmp / dir).string() +
               " --epochs 2 --batch-size 8 --hidden 6 --hidden-fc 6 --max-len 10 --seed " +
               std::to_string(seed) + " --quiet";
    }
};

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    CliFixture fix;
    CHECK(run_cli("", fix.out).exit_code == 2);                       // no subcommand
    CHECK(run_cli("train --model cnn", fix.out).exit_code == 2);      // missing required
    CHECK(run_cli("report --run x --bogus", fix.out).exit_code == 2); // unknown flag
    CHECK(run_cli("frobnicate", fix.out).exit_code == 2);             // unknown subcommand

    const CliResult help = run_cli("--help", fix.out);
    CHECK(help.exit_code == 0);
    CHECK(help.output.find("train") != std::string::npos);
}

TEST_CASE("train/eval/ensemble/report happy path") {
    CliFixture fix;

    const CliResult lstm = run_cli(fix.train_args("lstm", "run_lstm"), fix.out);
    INFO(lstm.output);
    REQUIRE(lstm.exit_code == 0);
    CHECK(lstm.output.find("best epoch") != std::string::npos);

    const CliResult cnn = run_cli(fix.train_args("cnn", "run_cnn"), fix.out);
    INFO(cnn.output);
    REQUIRE(cnn.exit_code == 0);

    const std::string eval_tail =
        " --data sst2:" + fix.tsv.string() + " --split train";
    const CliResult ev_l = run_cli(
        "eval --run " + (fix.tmp / "run_lstm").string() + eval_tail, fix.out);
    INFO(ev_l.output);
    REQUIRE(ev_l.exit_code == 0);
    CHECK(ev_l.output.find("accuracy ") != std::string::npos);

    const CliResult ev_c = run_cli(
        "eval --run " + (fix.tmp / "run_cnn").string() + eval_tail, fix.out);
    REQUIRE(ev_c.exit_code == 0);

    const std::string scores_l =
        (fix.tmp / "run_lstm/scores/lstm_sst2_train.json").string();
    const std::string scores_c =
        (fix.tmp / "run_cnn/scores/cnn_sst2_train.json").string();
    REQUIRE(std::filesystem::exists(scores_l));
    REQUIRE(std::filesystem::exists(scores_c));

    const CliResult ens = run_cli(
        "ensemble --scores-a " + scores_l + " --scores-b " + scores_c, fix.out);
    INFO(ens.output);
    REQUIRE(ens.exit_code == 0);
    CHECK(ens.output.find("model_id,accuracy") != std::string::npos);
    CHECK(ens.output.find("ensemble(lstm,cnn)") != std::string::npos);

    const CliResult rep = run_cli(
        "report --run " + (fix.tmp / "run_lstm").string() + " --bins 10 --top-words 5",
        fix.out);
    INFO(rep.output);
    REQUIRE(rep.exit_code == 0);
    CHECK(std::filesystem::exists(fix.tmp / "run_lstm/reports/wordfreq.csv"));
}

TEST_CASE("two identical train invocations produce identical checkpoint digests") {
    CliFixture fix;
    REQUIRE(run_cli(fix.train_args("cnn", "det_a", 9), fix.out).exit_code == 0);
    REQUIRE(run_cli(fix.train_args("cnn", "det_b", 9), fix.out).exit_code == 0);
    CHECK(sentistack::sha256_file(fix.tmp / "det_a/checkpoints/best.ckpt") ==
          sentistack::sha256_file(fix.tmp / "det_b/checkpoints/best.ckpt"));
    CHECK(sentistack::sha256_file(fix.tmp / "det_a/checkpoints/last.ckpt") ==
          sentistack::sha256_file(fix.tmp / "det_b/checkpoints/last.ckpt"));
}

TEST_CASE("data and format problems exit with code 3") {
    CliFixture fix;
    // Unreadable embedding file.
    CHECK(run_cli("train --model lstm --data sst2:" + fix.tsv.string() +
                      " --glove /nonexistent/vectors.txt --run " +
                      (fix.tmp / "r1").string() + " --quiet",
                  fix.out).exit_code == 3);

    // Malformed TSV label.
    write_file(fix.tmp / "bad.tsv", "fine\t1\nbroken\t7\n");
    CHECK(run_cli("train --model lstm --data sst2:" + (fix.tmp / "bad.tsv").string() +
                      " --glove " + fix.glove.string() + " --run " +
                      (fix.tmp / "r2").string() + " --quiet",
                  fix.out).exit_code == 3);

    // Corrupted checkpoint.
    REQUIRE(run_cli(fix.train_args("lstm", "run_ok"), fix.out).exit_code == 0);
    const auto ckpt = fix.tmp / "run_ok/checkpoints/best.ckpt";
    std::ifstream in(ckpt, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    in.close();
    write_file(ckpt, ss.str().substr(0, 40));
    const CliResult ev = run_cli("eval --run " + (fix.tmp / "run_ok").string() +
                                     " --data sst2:" + fix.tsv.string() + " --split train",
                                 fix.out);
    CHECK(ev.exit_code == 3);
    CHECK(ev.output.find("error:") != std::string::npos);
}

TEST_CASE("config file provides defaults and flags win") {
    CliFixture fix;
    write_file(fix.tmp / "cfg.json", R"({"epochs": 3, "hidden": 4, "seed": 5})");
    const std::string args =
        "train --model lstm --data sst2:" + fix.tsv.string() + " --glove " +
        fix.glove.string() + " --run " + (fix.tmp / "cfgrun").string() + " --config " +
        (fix.tmp / "cfg.json").string() + " --epochs 2 --batch-size 8 --max-len 10 --quiet";
    REQUIRE(run_cli(args, fix.out).exit_code == 0);
    std::ifstream in(fix.tmp / "cfgrun/manifest.json");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string manifest = ss.str();
    CHECK(manifest.find("\"epochs\": 2") != std::string::npos);  // flag beat config
    CHECK(manifest.find("\"hidden\": 4") != std::string::npos);  // config beat default
    CHECK(manifest.find("\"seed\": 5") != std::string::npos);
}

TEST_CASE("SENTISTACK_THREADS is honored") {
    CliFixture fix;
    const std::string cmd = "SENTISTACK_THREADS=1 " + std::string(SENTISTACK_CLI_PATH) +
                            " " + fix.train_args("lstm", "threads_run") + " > " +
                            (fix.tmp / "o.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 0);
    // Thread count must not change the arithmetic.
    REQUIRE(run_cli(fix.train_args("lstm", "threads_run2"), fix.out).exit_code == 0);
    CHECK(sentistack::sha256_file(fix.tmp / "threads_run/checkpoints/best.ckpt") ==
          sentistack::sha256_file(fix.tmp / "threads_run2/checkpoints/best.ckpt"));
}
