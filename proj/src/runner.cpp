#include "sentistack/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "sentistack/checkpoint.hpp"
#include "sentistack/errors.hpp"
#include "sentistack/glove.hpp"
#include "sentistack/report.hpp"
#include "sentistack/sha256.hpp"

namespace fs = std::filesystem;

namespace sentistack {

void init_threads(int requested) {
#ifdef _OPENMP
    int n = requested;
    if (n <= 0) {
        if (const char* env = std::getenv("SENTISTACK_THREADS")) {
            n = std::atoi(env);
        }
    }
    if (n > 0) omp_set_num_threads(n);
#else
    (void)requested;
#endif
}

DataSpec parse_data_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= spec.size()) {
        throw UsageError("data spec must be <dataset>:<path>, got \"" + spec + "\"");
    }
    DataSpec out;
    out.dataset = spec.substr(0, colon);
    out.path = spec.substr(colon + 1);
    if (out.dataset != "sst2" && out.dataset != "imdb") {
        throw UsageError("unknown dataset \"" + out.dataset + "\" (expected sst2 or imdb)");
    }
    return out;
}

Dataset load_split(const DataSpec& spec, Split split, bool allow_partial) {
    if (spec.dataset == "sst2") {
        return load_sst2(spec.path, split);
    }
    ImdbPair pair = load_imdb(spec.path, allow_partial);
    if (split == Split::train) return std::move(pair.train);
    if (split == Split::test) return std::move(pair.test);
    throw UsageError("imdb has no dev split");
}

RunPaths run_paths(const fs::path& root) {
    RunPaths p;
    p.root = root;
    p.manifest = root / "manifest.json";
    p.metrics = root / "metrics.jsonl";
    p.vocab = root / "vocab.txt";
    p.checkpoints = root / "checkpoints";
    p.scores = root / "scores";
    p.reports = root / "reports";
    return p;
}

Dataset subsample_balanced(const Dataset& ds, std::size_t per_class, std::uint64_t seed) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        (ds.examples[i].label == 1 ? pos : neg).push_back(i);
    }
    if (pos.size() < per_class || neg.size() < per_class) {
        throw DataError("subsample of " + std::to_string(per_class) +
                        " per class exceeds available " + std::to_string(pos.size()) +
                        " pos / " + std::to_string(neg.size()) + " neg");
    }
    Rng rng(mix_seed(seed, 0x737562ULL));  // "sub" stream
    rng.shuffle(pos);
    rng.shuffle(neg);
    pos.resize(per_class);
    neg.resize(per_class);
    std::vector<std::size_t> keep;
    keep.reserve(2 * per_class);
    keep.insert(keep.end(), pos.begin(), pos.end());
    keep.insert(keep.end(), neg.begin(), neg.end());
    std::sort(keep.begin(), keep.end());  // canonical order preserved

    Dataset out;
    out.split = ds.split;
    out.name = ds.name;
    out.examples.reserve(keep.size());
    for (std::size_t i : keep) out.examples.push_back(ds.examples[i]);
    return out;
}

namespace {

std::string iso_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

nlohmann::json config_json(const TrainConfig& cfg) {
    return {{"seed", cfg.seed},
            {"epochs", cfg.epochs},
            {"batch_size", cfg.batch_size},
            {"learning_rate", cfg.learning_rate},
            {"weight_decay", cfg.weight_decay},
            {"beta1", cfg.beta1},
            {"beta2", cfg.beta2},
            {"eps_adam", cfg.eps_adam},
            {"max_len", cfg.max_len},
            {"hidden", cfg.hidden},
            {"hidden_fc", cfg.hidden_fc},
            {"maps_per_bank", cfg.maps_per_bank},
            {"fine_tune_embeddings", cfg.fine_tune_embeddings}};
}

void write_manifest(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write manifest: " + path.string());
    }
    out << j.dump(2) << "\n";
}

std::size_t default_min_freq(const std::string& dataset) {
    return dataset == "imdb" ? 5 : 1;
}

}  // namespace

TrainOutcome run_train(const TrainOptions& opts) {
    opts.cfg.validate();
    const DataSpec spec = parse_data_spec(opts.data_spec);
    const RunPaths paths = run_paths(opts.run_dir);

    if (fs::exists(paths.root) && !fs::is_empty(paths.root)) {
        throw UsageError("run directory " + paths.root.string() +
                         " already exists and is not empty");
    }

    Dataset train = load_split(spec, Split::train, opts.allow_partial);
    if (opts.subsample_per_class > 0) {
        train = subsample_balanced(train, opts.subsample_per_class, opts.cfg.seed);
    }
    const std::size_t min_freq =
        opts.min_freq > 0 ? opts.min_freq : default_min_freq(spec.dataset);
    const Vocabulary vocab = build_vocab(train, min_freq);

    fs::create_directories(paths.checkpoints);
    fs::create_directories(paths.scores);
    vocab.save(paths.vocab.string());

    if (opts.echo_progress) {
        std::cerr << "loaded " << train.size() << " training examples, vocabulary "
                  << vocab.size() << " (min_freq " << min_freq << ")\n";
    }

    const GloveLoadResult glove = load_glove(opts.glove_path, vocab, opts.cfg.seed);
    if (opts.echo_progress) {
        std::cerr << "embeddings d=" << glove.embeddings.dim << ", coverage "
                  << glove.covered << "/" << glove.covered + glove.missing << "\n";
    }

    nlohmann::json manifest = {
        {"tool", kToolName},
        {"version", kToolVersion},
        {"status", "running"},
        {"model", model_kind_name(opts.kind)},
        {"seed", opts.cfg.seed},
        {"data_spec", opts.data_spec},
        {"dataset",
         {{"name", train.name},
          {"split", split_name(train.split)},
          {"hash", train.content_hash()},
          {"size", train.size()},
          {"subsample_per_class", opts.subsample_per_class}}},
        {"embedding",
         {{"path", opts.glove_path.string()},
          {"sha256", sha256_file(opts.glove_path)},
          {"dim", glove.embeddings.dim},
          {"covered", glove.covered},
          {"missing", glove.missing}}},
        {"vocab", {{"size", vocab.size()}, {"hash", vocab.content_hash()}}},
        {"config", config_json(opts.cfg)},
        {"min_freq", min_freq},
        {"allow_partial", opts.allow_partial},
        {"started_at", iso_utc_now()}};
    write_manifest(paths.manifest, manifest);

    train = index_dataset(std::move(train), vocab);

    std::ofstream metrics(paths.metrics, std::ios::binary | std::ios::trunc);
    if (!metrics) {
        throw IoError("cannot write metrics log: " + paths.metrics.string());
    }

    TrainOutcome outcome;
    outcome.run_dir = paths.root;
    double best_accuracy = -1.0;
    std::size_t best_epoch = 0;

    const EpochSink sink = [&](const EpochRecord& rec, const ModelParams& current,
                               bool is_best) {
        nlohmann::json line = {{"epoch", rec.epoch},
                               {"train_accuracy", rec.train_accuracy},
                               {"train_loss", rec.train_loss},
                               {"wall_time", rec.wall_time}};
        metrics << line.dump() << "\n";
        metrics.flush();
        save_checkpoint(paths.checkpoints / "last.ckpt", current);
        if (is_best) {
            save_checkpoint(paths.checkpoints / "best.ckpt", current);
            best_accuracy = rec.train_accuracy;
            best_epoch = rec.epoch;
        }
        if (opts.echo_progress) {
            std::cerr << "epoch " << rec.epoch << ": accuracy "
                      << format_double(rec.train_accuracy) << ", loss "
                      << format_double(rec.train_loss) << " (" << format_double(rec.wall_time)
                      << "s)" << (is_best ? " *" : "") << "\n";
        }
    };

    TrainResult result;
    try {
        result = train_model(opts.kind, train, opts.cfg, glove.embeddings,
                             vocab.content_hash(), sink);
    } catch (const NumericError&) {
        manifest["status"] = "diverged";
        manifest["finished_at"] = iso_utc_now();
        write_manifest(paths.manifest, manifest);
        throw;
    }

    outcome.history = result.history;
    outcome.best_epoch = best_epoch;
    outcome.best_train_accuracy = best_accuracy;

    manifest["status"] = "complete";
    manifest["finished_at"] = iso_utc_now();
    manifest["best"] = {{"epoch", best_epoch}, {"train_accuracy", best_accuracy}};
    write_manifest(paths.manifest, manifest);
    return outcome;
}

EvalOutcome run_eval(const EvalOptions& opts) {
    const RunPaths paths = run_paths(opts.run_dir);
    if (!fs::exists(paths.manifest)) {
        throw DataError("run directory without a manifest is invalid: " +
                        paths.root.string());
    }

    fs::path ckpt_path;
    if (opts.checkpoint == "best" || opts.checkpoint == "last") {
        ckpt_path = paths.checkpoints / (opts.checkpoint + ".ckpt");
    } else {
        ckpt_path = opts.checkpoint;
    }
    const ModelParams model = load_checkpoint(ckpt_path);

    const Vocabulary vocab = Vocabulary::load(paths.vocab.string());
    if (vocab.content_hash() != model.vocab_hash) {
        throw CompatError("checkpoint " + ckpt_path.string() +
                          " was trained with a different vocabulary than " +
                          paths.vocab.string());
    }

    const DataSpec spec = parse_data_spec(opts.data_spec);
    Dataset ds = load_split(spec, opts.split, opts.allow_partial);
    if (ds.examples.empty()) {
        throw DataError("evaluation dataset is empty: " + opts.data_spec);
    }
    ds = index_dataset(std::move(ds), vocab);

    const EvalResult eval = evaluate(model, ds);

    ScoreSet scores;
    scores.model_id = model_kind_name(model.kind);
    scores.scores = eval.scores;
    scores.dataset_hash = ds.content_hash();
    scores.dataset_name = ds.name;
    scores.dataset_split = split_name(ds.split);
    scores.labels.reserve(ds.size());
    for (const auto& ex : ds.examples) scores.labels.push_back(ex.label);

    fs::create_directories(paths.scores);
    const fs::path out_path =
        paths.scores /
        (scores.model_id + "_" + ds.name + "_" + split_name(ds.split) + ".json");
    scores.save(out_path);

    return {eval.accuracy, out_path};
}

EnsembleOutcome run_ensemble(const EnsembleOptions& opts) {
    const ScoreSet a = ScoreSet::load(opts.scores_a);
    const ScoreSet b = ScoreSet::load(opts.scores_b);
    const ScoreSet ens = ensemble_average(a, b);

    EnsembleOutcome outcome;
    outcome.table = accuracy_table({a, b, ens}, a.labels);

    const fs::path out_dir =
        opts.out_dir.empty() ? opts.scores_a.parent_path() : opts.out_dir;
    fs::create_directories(out_dir);
    outcome.ensemble_scores_path =
        out_dir / ("ensemble_" + ens.dataset_name + "_" + ens.dataset_split + ".json");
    ens.save(outcome.ensemble_scores_path);

    outcome.table_path =
        out_dir / ("accuracy_" + ens.dataset_name + "_" + ens.dataset_split + ".csv");
    std::ofstream out(outcome.table_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write accuracy table: " + outcome.table_path.string());
    }
    out << "model_id,accuracy\n";
    for (const auto& row : outcome.table) {
        out << csv_field(row.model_id) << "," << format_double(row.accuracy) << "\n";
    }
    return outcome;
}

}  // namespace sentistack
