// Command-line front end: train, eval, ensemble, report.
//
// Exit codes: 0 success, 2 usage errors, 3 data/format/io errors, 4 numeric
// errors (divergence, non-finite values, internal shape violations).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sentistack/errors.hpp"
#include "sentistack/report.hpp"
#include "sentistack/runner.hpp"

namespace fs = std::filesystem;
using namespace sentistack;

namespace {

struct TrainCli {
    std::string data;
    std::string glove;
    std::string model = "lstm";
    std::string run_dir;
    std::string config_file;
    TrainConfig cfg;
    std::size_t min_freq = 0;
    std::size_t subsample = 0;
    bool allow_partial = false;
    bool no_fine_tune = false;
    bool quiet = false;
};

// Config resolution: dataset defaults, then the JSON config file, then any
// flag the user set explicitly.
TrainConfig resolve_config(const TrainCli& cli, const CLI::App* cmd) {
    TrainConfig cfg = TrainConfig::defaults_for(parse_data_spec(cli.data).dataset);

    if (!cli.config_file.empty()) {
        std::ifstream in(cli.config_file, std::ios::binary);
        if (!in) {
            throw IoError("cannot open config file: " + cli.config_file);
        }
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(cli.config_file + ": invalid JSON: " + e.what());
        }
        cfg.seed = j.value("seed", cfg.seed);
        cfg.epochs = j.value("epochs", cfg.epochs);
        cfg.batch_size = j.value("batch_size", cfg.batch_size);
        cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
        cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
        cfg.beta1 = j.value("beta1", cfg.beta1);
        cfg.beta2 = j.value("beta2", cfg.beta2);
        cfg.eps_adam = j.value("eps_adam", cfg.eps_adam);
        cfg.max_len = j.value("max_len", cfg.max_len);
        cfg.hidden = j.value("hidden", cfg.hidden);
        cfg.hidden_fc = j.value("hidden_fc", cfg.hidden_fc);
        cfg.maps_per_bank = j.value("maps_per_bank", cfg.maps_per_bank);
        cfg.fine_tune_embeddings = j.value("fine_tune_embeddings", cfg.fine_tune_embeddings);
    }

    auto take = [&cmd](const char* flag, auto& dst, const auto& src) {
        if (cmd->count(flag) > 0) dst = src;
    };
    take("--seed", cfg.seed, cli.cfg.seed);
    take("--epochs", cfg.epochs, cli.cfg.epochs);
    take("--batch-size", cfg.batch_size, cli.cfg.batch_size);
    take("--lr", cfg.learning_rate, cli.cfg.learning_rate);
    take("--weight-decay", cfg.weight_decay, cli.cfg.weight_decay);
    take("--max-len", cfg.max_len, cli.cfg.max_len);
    take("--hidden", cfg.hidden, cli.cfg.hidden);
    take("--hidden-fc", cfg.hidden_fc, cli.cfg.hidden_fc);
    if (cli.no_fine_tune) cfg.fine_tune_embeddings = false;
    return cfg;
}

int exit_code_for(const Error& e) {
    if (dynamic_cast<const UsageError*>(&e) != nullptr) return 2;
    if (dynamic_cast<const NumericError*>(&e) != nullptr ||
        dynamic_cast<const ShapeError*>(&e) != nullptr ||
        dynamic_cast<const ContractError*>(&e) != nullptr) {
        return 4;
    }
    return 3;  // data/format/io/layout/alignment/compat
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sentiment classification with a Bi-LSTM, a text CNN, and their ensemble"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    int threads = 0;
    app.add_option("--threads", threads, "cap worker threads (default: SENTISTACK_THREADS)");

    // ---- train ----
    TrainCli tr;
    CLI::App* train_cmd = app.add_subcommand("train", "train one model into a run directory");
    train_cmd->add_option("--data", tr.data, "dataset spec, sst2:<tsv> or imdb:<root>")
        ->required();
    train_cmd->add_option("--glove", tr.glove, "GloVe-format embedding file")->required();
    train_cmd->add_option("--model", tr.model, "lstm or cnn")->required();
    train_cmd->add_option("--run", tr.run_dir, "run directory to create")->required();
    train_cmd->add_option("--config", tr.config_file, "JSON config file (flags win)");
    train_cmd->add_option("--seed", tr.cfg.seed, "RNG seed");
    train_cmd->add_option("--epochs", tr.cfg.epochs, "training epochs");
    train_cmd->add_option("--batch-size", tr.cfg.batch_size, "mini-batch size");
    train_cmd->add_option("--lr", tr.cfg.learning_rate, "learning rate");
    train_cmd->add_option("--weight-decay", tr.cfg.weight_decay, "L2 coefficient");
    train_cmd->add_option("--max-len", tr.cfg.max_len, "sequence truncation length");
    train_cmd->add_option("--hidden", tr.cfg.hidden, "LSTM hidden size");
    train_cmd->add_option("--hidden-fc", tr.cfg.hidden_fc, "CNN FC hidden size");
    train_cmd->add_option("--min-freq", tr.min_freq, "vocabulary frequency threshold");
    train_cmd->add_option("--subsample", tr.subsample, "per-class training subsample");
    train_cmd->add_flag("--allow-partial", tr.allow_partial,
                        "accept imdb splits below the 12500-per-cell grid");
    train_cmd->add_flag("--no-fine-tune", tr.no_fine_tune, "freeze embeddings");
    train_cmd->add_flag("--quiet", tr.quiet, "suppress per-epoch progress");

    // ---- eval ----
    EvalOptions ev;
    std::string ev_run, ev_split = "test";
    CLI::App* eval_cmd = app.add_subcommand("eval", "score a dataset with a checkpoint");
    eval_cmd->add_option("--run", ev_run, "run directory holding the checkpoint")->required();
    eval_cmd->add_option("--data", ev.data_spec, "dataset spec to score")->required();
    eval_cmd->add_option("--checkpoint", ev.checkpoint, "best, last, or a path");
    eval_cmd->add_option("--split", ev_split, "train, dev, or test");
    eval_cmd->add_flag("--allow-partial", ev.allow_partial,
                       "accept imdb splits below the 12500-per-cell grid");

    // ---- ensemble ----
    std::string en_a, en_b, en_out;
    CLI::App* ens_cmd = app.add_subcommand("ensemble", "average two score sets");
    ens_cmd->add_option("--scores-a", en_a, "first score-set JSON")->required();
    ens_cmd->add_option("--scores-b", en_b, "second score-set JSON")->required();
    ens_cmd->add_option("--out", en_out, "output directory (default: alongside scores-a)");

    // ---- report ----
    ReportOptions rep;
    std::string rep_run;
    CLI::App* rep_cmd = app.add_subcommand("report", "export CSV reports for a run");
    rep_cmd->add_option("--run", rep_run, "run directory")->required();
    rep_cmd->add_option("--bins", rep.bins, "histogram bin count");
    rep_cmd->add_option("--top-words", rep.top_words, "word-frequency list length");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        init_threads(threads);

        if (*train_cmd) {
            TrainOptions opts;
            opts.data_spec = tr.data;
            opts.glove_path = tr.glove;
            opts.kind = parse_model_kind(tr.model);
            opts.cfg = resolve_config(tr, train_cmd);
            opts.run_dir = tr.run_dir;
            opts.min_freq = tr.min_freq;
            opts.allow_partial = tr.allow_partial;
            opts.subsample_per_class = tr.subsample;
            opts.echo_progress = !tr.quiet;
            const TrainOutcome outcome = run_train(opts);
            std::cout << "run " << outcome.run_dir.string() << " complete; best epoch "
                      << outcome.best_epoch << " train accuracy "
                      << format_double(outcome.best_train_accuracy) << "\n";
        } else if (*eval_cmd) {
            ev.run_dir = ev_run;
            if (ev_split == "train") {
                ev.split = Split::train;
            } else if (ev_split == "dev") {
                ev.split = Split::dev;
            } else if (ev_split == "test") {
                ev.split = Split::test;
            } else {
                throw UsageError("unknown split \"" + ev_split + "\"");
            }
            const EvalOutcome outcome = run_eval(ev);
            std::cout << "accuracy " << format_double(outcome.accuracy) << "\n";
            std::cout << "scores " << outcome.scores_path.string() << "\n";
        } else if (*ens_cmd) {
            EnsembleOptions opts;
            opts.scores_a = en_a;
            opts.scores_b = en_b;
            if (!en_out.empty()) opts.out_dir = en_out;
            const EnsembleOutcome outcome = run_ensemble(opts);
            std::cout << "model_id,accuracy\n";
            for (const auto& row : outcome.table) {
                std::cout << csv_field(row.model_id) << "," << format_double(row.accuracy) << "\n";
            }
        } else if (*rep_cmd) {
            rep.run_dir = rep_run;
            for (const auto& f : report_bundle(rep)) {
                std::cout << f.string() << "\n";
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
