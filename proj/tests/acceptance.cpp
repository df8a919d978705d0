// Acceptance suite. Each criterion prints one PASS/FAIL line; groups that
// need real corpora (sst2, imdb, wordfreq) skip with exit code 77 when the
// data paths are not provided:
//
//   SENTISTACK_SST2_TRAIN  sentence-level train TSV
//   SENTISTACK_SST2_TEST   sentence-level test TSV
//   SENTISTACK_IMDB_ROOT   aclImdb directory
//   SENTISTACK_GLOVE       GloVe-format embedding file
//
// Usage: acceptance --criteria {core|sst2|imdb|wordfreq}

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "sentistack/checkpoint.hpp"
#include "sentistack/ensemble.hpp"
#include "sentistack/errors.hpp"
#include "sentistack/grad_check.hpp"
#include "sentistack/report.hpp"
#include "sentistack/runner.hpp"
#include "sentistack/sha256.hpp"
#include "support/temp_dir.hpp"
#include "support/toy_corpus.hpp"

using namespace sentistack;

namespace {

constexpr double kGradTol = 1e-4;
constexpr double kGradEps = 1e-5;
constexpr int kGradSeeds = 20;

int g_failures = 0;

void report(bool ok, const std::string& line) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << line << "\n";
    if (!ok) ++g_failures;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0,
                     double hi = 1.0) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
    return m;
}

LstmCellParams random_cell(std::size_t input_dim, std::size_t hidden, Rng& rng) {
    LstmCellParams p = LstmCellParams::zeros(input_dim, hidden);
    ParamRefs refs;
    p.append_params("c", &refs);
    for (auto& [name, m] : refs) {
        for (std::size_t i = 0; i < m->size(); ++i) m->data()[i] = rng.uniform(-0.8, 0.8);
    }
    return p;
}

double worst_over_blocks(const ParamRefs& params, const ConstParamRefs& grads,
                         const std::function<double()>& loss) {
    double worst = 0.0;
    for (std::size_t blk = 0; blk < params.size(); ++blk) {
        Matrix* target = params[blk].second;
        const Matrix point = *target;
        const auto f = [&](const Matrix& v) {
            *target = v;
            const double out = loss();
            *target = point;
            return out;
        };
        const GradCheckReport rep = grad_check(f, point, *grads[blk].second, kGradEps);
        worst = std::max(worst, rep.max_relative_error);
    }
    return worst;
}

// ---- criterion 1: gradient oracle suite -----------------------------------

double check_lstm_cell_grads() {
    double worst = 0.0;
    for (int seed = 0; seed < kGradSeeds; ++seed) {
        Rng rng(1000 + seed);
        const std::size_t d = 3, H = 4, B = 2;
        LstmCellParams p = random_cell(d, H, rng);
        const Matrix x = random_matrix(d, B, rng);
        const LstmState prev{random_matrix(H, B, rng), random_matrix(H, B, rng)};
        const Matrix wh = random_matrix(H, B, rng);
        const Matrix wc = random_matrix(H, B, rng);

        const auto loss = [&]() {
            const LstmState next = lstm_cell_forward(x, prev, p, nullptr);
            double total = 0.0;
            for (std::size_t i = 0; i < wh.size(); ++i) {
                total += wh.data()[i] * next.h.data()[i] + wc.data()[i] * next.c.data()[i];
            }
            return total;
        };

        LstmCellCache cache;
        lstm_cell_forward(x, prev, p, &cache);
        LstmCellParams grads = LstmCellParams::zeros(d, H);
        lstm_cell_backward(wh, wc, cache, p, &grads);

        ParamRefs refs;
        p.append_params("cell", &refs);
        ParamRefs grefs_mut;
        grads.append_params("cell", &grefs_mut);
        ConstParamRefs grefs(grefs_mut.begin(), grefs_mut.end());
        worst = std::max(worst, worst_over_blocks(refs, grefs, loss));
    }
    return worst;
}

double check_bilstm_stack_grads() {
    double worst = 0.0;
    for (int seed = 0; seed < kGradSeeds; ++seed) {
        Rng rng(2000 + seed);
        const std::size_t d = 3, H = 3, T = 4, B = 2;
        Rng init(3000 + seed);
        BiLstmClassifier model = BiLstmClassifier::init(d, H, init);
        std::vector<Matrix> seq;
        for (std::size_t t = 0; t < T; ++t) seq.push_back(random_matrix(d, B, rng));
        const std::vector<std::size_t> lengths = {T, T - 2};
        const std::vector<int> labels = {1, 0};

        const auto loss = [&]() {
            const Matrix probs = bilstm_classify_forward(seq, lengths, model, nullptr);
            return cross_entropy(transpose(probs), labels);
        };

        BiLstmForwardCache cache;
        const Matrix probs = bilstm_classify_forward(seq, lengths, model, &cache);
        const Matrix grad_probs = transpose(cross_entropy_grad(transpose(probs), labels));
        BiLstmGrads grads = BiLstmGrads::zeros_like(model);
        const auto grad_seq = bilstm_classify_backward(grad_probs, cache, model, &grads);

        worst = std::max(worst, worst_over_blocks(model.params(), grads.params(), loss));

        // Embedding gradients: dL/dseq drives fine-tuning.
        for (std::size_t t = 0; t < T; ++t) {
            const auto f = [&](const Matrix& v) {
                std::vector<Matrix> seq2 = seq;
                seq2[t] = v;
                const Matrix p2 = bilstm_classify_forward(seq2, lengths, model, nullptr);
                return cross_entropy(transpose(p2), labels);
            };
            const GradCheckReport rep = grad_check(f, seq[t], grad_seq[t], kGradEps);
            worst = std::max(worst, rep.max_relative_error);
        }
    }
    return worst;
}

// Smallest top-2 pooled margin; steps of eps must not flip any argmax.
double min_pool_margin(const CnnForwardCache& cache) {
    double margin = 1e9;
    for (const auto& pre : cache.conv_pre) {
        const Matrix act = relu(pre);
        for (std::size_t i = 0; i < act.rows(); ++i) {
            double best = -1e9, second = -1e9;
            for (std::size_t j = 0; j < act.cols(); ++j) {
                if (act(i, j) > best) {
                    second = best;
                    best = act(i, j);
                } else if (act(i, j) > second) {
                    second = act(i, j);
                }
            }
            if (act.cols() > 1) margin = std::min(margin, best - second);
        }
    }
    return margin;
}

double check_cnn_grads() {
    double worst = 0.0;
    int checked = 0;
    for (int seed = 0; checked < kGradSeeds && seed < 200; ++seed) {
        Rng rng(4000 + seed);
        const std::size_t d = 4, T = 6;
        Rng init(5000 + seed);
        CnnParams model = CnnParams::init(d, 3, 5, init);
        const Matrix seq = random_matrix(T, d, rng);
        const int label = seed % 2;

        CnnForwardCache cache;
        const Matrix probs = cnn_classify_forward(seq, model, &cache);
        if (min_pool_margin(cache) < 1e-3) continue;  // near-tie: argmax could flip
        ++checked;

        const auto loss = [&]() {
            const Matrix p2 = cnn_classify_forward(seq, model, nullptr);
            return cross_entropy(transpose(p2), {label});
        };
        const Matrix grad_probs = transpose(cross_entropy_grad(transpose(probs), {label}));
        CnnParams grads = CnnParams::zeros(d, 3, 5);
        const Matrix grad_seq = cnn_classify_backward(grad_probs, cache, model, &grads);

        worst = std::max(worst,
                         worst_over_blocks(model.params(), std::as_const(grads).params(),
                                           loss));

        const auto f_seq = [&](const Matrix& v) {
            const Matrix p2 = cnn_classify_forward(v, model, nullptr);
            return cross_entropy(transpose(p2), {label});
        };
        const GradCheckReport rep = grad_check(f_seq, seq, grad_seq, kGradEps);
        worst = std::max(worst, rep.max_relative_error);
    }
    if (checked < kGradSeeds) return 1.0;  // could not assemble enough clean draws
    return worst;
}

double check_maxpool_grads() {
    double worst = 0.0;
    for (int seed = 0; seed < kGradSeeds; ++seed) {
        Rng rng(6000 + seed);
        Matrix feat = random_matrix(5, 6, rng);
        const Matrix w = random_matrix(5, 1, rng);
        const MaxPoolResult pre = max_over_time(feat);
        for (std::size_t i = 0; i < feat.rows(); ++i) feat(i, pre.argmax[i]) += 0.01;

        const MaxPoolResult pool = max_over_time(feat);
        Matrix analytic(feat.rows(), feat.cols());
        for (std::size_t i = 0; i < feat.rows(); ++i) {
            analytic(i, pool.argmax[i]) = w(i, 0);
        }
        const auto f = [&w](const Matrix& X) {
            const MaxPoolResult r = max_over_time(X);
            double s = 0.0;
            for (std::size_t i = 0; i < X.rows(); ++i) s += w(i, 0) * r.values(i, 0);
            return s;
        };
        const GradCheckReport rep = grad_check(f, feat, analytic, kGradEps);
        worst = std::max(worst, rep.max_relative_error);
    }
    return worst;
}

double check_softmax_ce_grads() {
    double worst = 0.0;
    for (int seed = 0; seed < kGradSeeds; ++seed) {
        Rng rng(7000 + seed);
        const Matrix logits = random_matrix(5, 2, rng, -3.0, 3.0);
        std::vector<int> labels(5);
        for (auto& y : labels) y = rng.below(2) == 1 ? 1 : 0;
        const auto f = [&labels](const Matrix& z) {
            return cross_entropy(softmax_rows(z), labels);
        };
        const Matrix probs = softmax_rows(logits);
        const Matrix analytic =
            softmax_rows_backward(probs, cross_entropy_grad(probs, labels));
        const GradCheckReport rep = grad_check(f, logits, analytic, kGradEps);
        worst = std::max(worst, rep.max_relative_error);
    }
    return worst;
}

bool criterion_1() {
    struct Piece {
        const char* name;
        double worst;
    };
    const Piece pieces[] = {
        {"lstm cell", check_lstm_cell_grads()},
        {"bilstm stack + head + embeddings", check_bilstm_stack_grads()},
        {"conv banks + fc layers + embeddings", check_cnn_grads()},
        {"max-pool", check_maxpool_grads()},
        {"softmax/cross-entropy", check_softmax_ce_grads()},
    };
    bool ok = true;
    double worst = 0.0;
    for (const Piece& p : pieces) {
        if (p.worst >= kGradTol) {
            ok = false;
            std::cout << "       gradient oracle exceeded tolerance: " << p.name << " "
                      << p.worst << "\n";
        }
        worst = std::max(worst, p.worst);
    }
    report(ok, "criterion 1: gradient oracle suite, " + std::to_string(kGradSeeds) +
                   " seeds per backward, max relative error " + format_double(worst) +
                   " (tolerance 1e-4)");
    return ok;
}

// ---- criterion 2: closed-form LSTM cell cases ------------------------------

bool criterion_2() {
    // Zero parameters: gates 0.5, candidate 0, so c = 0.5*c_prev and
    // h = 0.5*tanh(0.5).
    const LstmCellParams zero = LstmCellParams::zeros(2, 1);
    const LstmState prev{Matrix(1, 1, 0.0), Matrix(1, 1, 1.0)};
    const LstmState next =
        lstm_cell_forward(Matrix::from_rows({{1.3}, {-0.4}}), prev, zero, nullptr);
    const bool case_a = std::abs(next.c(0, 0) - 0.5) < 1e-9 &&
                        std::abs(next.h(0, 0) - 0.2310585786) < 1e-9;

    // Saturated gates (+-100): the memory cell carries unchanged.
    LstmCellParams sat = LstmCellParams::zeros(2, 3);
    sat.b_f.fill(100.0);
    sat.b_i.fill(-100.0);
    Rng rng(42);
    LstmState state{Matrix(3, 2, 0.0), random_matrix(3, 2, rng)};
    const Matrix c0 = state.c;
    for (int t = 0; t < 9; ++t) {
        state = lstm_cell_forward(random_matrix(2, 2, rng, -2.0, 2.0), state, sat, nullptr);
    }
    double drift = 0.0;
    for (std::size_t i = 0; i < c0.size(); ++i) {
        drift = std::max(drift, std::abs(state.c.data()[i] - c0.data()[i]));
    }
    const bool case_b = drift < 1e-12;

    report(case_a && case_b,
           "criterion 2: closed-form cell cases (zero-parameter within 1e-9, "
           "saturated carry drift " +
               format_double(drift) + " < 1e-12)");
    return case_a && case_b;
}

// ---- criterion 3: property suite -------------------------------------------

bool criterion_3() {
    bool ok = true;

    // Bidirectional reversal equivariance, 1e-12.
    {
        Rng rng(101);
        const LstmCellParams fwd = random_cell(2, 3, rng);
        const LstmCellParams bwd = random_cell(2, 3, rng);
        std::vector<Matrix> seq;
        for (int t = 0; t < 5; ++t) seq.push_back(random_matrix(2, 2, rng));
        const auto out = bilstm_layer_forward(seq, fwd, bwd, nullptr);
        std::vector<Matrix> rev(seq.rbegin(), seq.rend());
        const auto out_rev = bilstm_layer_forward(rev, bwd, fwd, nullptr);
        double worst = 0.0;
        const std::size_t H = 3;
        for (std::size_t t = 0; t < seq.size(); ++t) {
            const Matrix& a = out[t];
            const Matrix& b = out_rev[seq.size() - 1 - t];
            for (std::size_t i = 0; i < H; ++i) {
                for (std::size_t j = 0; j < a.cols(); ++j) {
                    worst = std::max(worst, std::abs(a(i, j) - b(H + i, j)));
                    worst = std::max(worst, std::abs(a(H + i, j) - b(i, j)));
                }
            }
        }
        if (worst >= 1e-12) ok = false;
    }

    // Padding invariance of the classifier, 1e-12.
    {
        Rng rng(103);
        Rng init(104);
        const BiLstmClassifier model = BiLstmClassifier::init(3, 4, init);
        std::vector<Matrix> seq;
        for (int t = 0; t < 3; ++t) seq.push_back(random_matrix(3, 2, rng));
        const std::vector<std::size_t> lengths = {3, 2};
        const Matrix base = bilstm_classify_forward(seq, lengths, model, nullptr);
        std::vector<Matrix> padded = seq;
        padded.push_back(Matrix(3, 2));
        padded.push_back(Matrix(3, 2));
        const Matrix ext = bilstm_classify_forward(padded, lengths, model, nullptr);
        for (std::size_t i = 0; i < base.size(); ++i) {
            if (std::abs(base.data()[i] - ext.data()[i]) >= 1e-12) ok = false;
        }
    }

    // Ensemble commutativity, idempotence, agreement preservation: exact.
    {
        Rng rng(105);
        ScoreSet a, b;
        a.model_id = "lstm";
        b.model_id = "cnn";
        a.dataset_hash = b.dataset_hash = "d";
        for (int i = 0; i < 500; ++i) {
            a.scores.push_back(rng.uniform01());
            b.scores.push_back(rng.uniform01());
            const int label = rng.below(2) == 1 ? 1 : 0;
            a.labels.push_back(label);
            b.labels.push_back(label);
        }
        const ScoreSet ab = ensemble_average(a, b);
        const ScoreSet ba = ensemble_average(b, a);
        const ScoreSet aa = ensemble_average(a, a);
        for (std::size_t i = 0; i < a.scores.size(); ++i) {
            if (ab.scores[i] != ba.scores[i]) ok = false;
            if (aa.scores[i] != a.scores[i]) ok = false;
            const bool pa = a.scores[i] >= 0.5, pb = b.scores[i] >= 0.5,
                       pe = ab.scores[i] >= 0.5;
            if (pa == pb && pe != pa) ok = false;
        }
    }

    // Softmax row sums within 1e-12.
    {
        Rng rng(107);
        const Matrix s = softmax_rows(random_matrix(20, 5, rng, -15.0, 15.0));
        for (std::size_t i = 0; i < s.rows(); ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < s.cols(); ++j) sum += s(i, j);
            if (std::abs(sum - 1.0) >= 1e-12) ok = false;
        }
    }

    // Histogram conservation: exact.
    {
        Rng rng(109);
        ScoreSet s;
        s.model_id = "m";
        s.dataset_hash = "d";
        for (int i = 0; i < 777; ++i) {
            s.scores.push_back(rng.uniform01());
            s.labels.push_back(rng.below(2) == 1 ? 1 : 0);
        }
        const ScoreHistogram h = score_histogram(s, 20);
        const std::size_t total =
            std::accumulate(h.positive.begin(), h.positive.end(), std::size_t{0}) +
            std::accumulate(h.negative.begin(), h.negative.end(), std::size_t{0});
        if (total != s.scores.size()) ok = false;
    }

    report(ok,
           "criterion 3: property suite (reversal equivariance, padding invariance, "
           "ensemble laws, softmax row sums, histogram conservation)");
    return ok;
}

// ---- criterion 4: overfit sanity -------------------------------------------

bool criterion_4() {
    bool ok = true;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        Dataset corpus = test_support::make_toy_corpus(32, seed);
        const Vocabulary vocab = build_vocab(corpus, 1);
        corpus = index_dataset(std::move(corpus), vocab);

        EmbeddingMatrix emb;
        emb.dim = 8;
        emb.vectors = Matrix(vocab.size(), emb.dim);
        Rng erng(mix_seed(seed, 500));
        for (std::size_t r = 1; r < vocab.size(); ++r) {
            for (std::size_t c = 0; c < emb.dim; ++c) {
                emb.vectors(r, c) = erng.uniform(-0.1, 0.1);
            }
        }

        TrainConfig cfg;  // default learning rate 1e-4 and weight decay 1e-5
        cfg.seed = seed;
        cfg.epochs = 200;
        cfg.batch_size = 2;
        cfg.max_len = 10;
        cfg.hidden = 16;
        cfg.hidden_fc = 16;
        cfg.maps_per_bank = 8;

        for (ModelKind kind : {ModelKind::lstm, ModelKind::cnn}) {
            const TrainResult r =
                train_model(kind, corpus, cfg, emb, vocab.content_hash());
            double best = 0.0;
            std::size_t best_epoch = 0;
            for (const auto& rec : r.history) {
                if (rec.train_accuracy > best) {
                    best = rec.train_accuracy;
                    best_epoch = rec.epoch;
                }
            }
            const bool reached = best == 1.0;
            if (!reached) ok = false;
            std::cout << "       overfit " << model_kind_name(kind) << " seed " << seed
                      << ": best train accuracy " << format_double(best) << " at epoch "
                      << best_epoch << "\n";
        }
    }
    report(ok, "criterion 4: overfit sanity, 32-example corpus, 3 seeds, both models "
               "reach 100% within 200 epochs at the default learning rate");
    return ok;
}

// ---- criterion 5: scalar ADAM equivalence ----------------------------------

bool criterion_5() {
    // Independent scalar reference, written against the textbook update.
    double m = 0.0, v = 0.0, w_ref = 1.0;
    TrainConfig cfg;
    Matrix w(1, 1, 1.0);
    AdamState state;
    ParamRefs params = {{"w", &w}};
    double worst = 0.0;
    for (int t = 1; t <= 100; ++t) {
        Matrix g(1, 1, 2.0 * w(0, 0));
        adam_step(params, {&g}, state, cfg);

        const double gr = 2.0 * w_ref + cfg.weight_decay * w_ref;
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * gr;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * gr * gr;
        const double m_hat = m / (1.0 - std::pow(cfg.beta1, t));
        const double v_hat = v / (1.0 - std::pow(cfg.beta2, t));
        w_ref -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.eps_adam);

        worst = std::max(worst, std::abs(w(0, 0) - w_ref));
    }
    const bool ok = worst < 1e-12;
    report(ok, "criterion 5: scalar ADAM, 100 steps on f(w)=w^2 from w=1, max deviation " +
                   format_double(worst) + " (tolerance 1e-12)");
    return ok;
}

// ---- criterion 6: determinism ----------------------------------------------

bool criterion_6() {
    test_support::TempDir tmp("acceptance_det");
    const Dataset corpus = test_support::make_toy_corpus(32, 11);
    test_support::write_file(tmp / "train.tsv", test_support::toy_corpus_tsv(corpus));
    test_support::write_file(tmp / "glove.txt", test_support::toy_glove_text(6, 3));

    auto run_once = [&](ModelKind kind, const std::string& dir) {
        TrainOptions opts;
        opts.data_spec = "sst2:" + (tmp / "train.tsv").string();
        opts.glove_path = tmp / "glove.txt";
        opts.kind = kind;
        opts.cfg.seed = 5;
        opts.cfg.epochs = 3;
        opts.cfg.batch_size = 8;
        opts.cfg.max_len = 10;
        opts.cfg.hidden = 8;
        opts.cfg.hidden_fc = 8;
        opts.cfg.maps_per_bank = 4;
        opts.run_dir = tmp / dir;
        opts.echo_progress = false;
        const TrainOutcome outcome = run_train(opts);
        EvalOptions ev;
        ev.run_dir = outcome.run_dir;
        ev.data_spec = opts.data_spec;
        ev.split = Split::train;
        run_eval(ev);
        ReportOptions rep;
        rep.run_dir = outcome.run_dir;
        report_bundle(rep);
        return outcome.run_dir;
    };

    bool ok = true;
    for (ModelKind kind : {ModelKind::lstm, ModelKind::cnn}) {
        const std::string base = model_kind_name(kind);
        const auto dir_a = run_once(kind, base + "_a");
        const auto dir_b = run_once(kind, base + "_b");
        // metrics.jsonl carries wall_time and is not a report; everything
        // else must match byte for byte.
        for (const char* rel :
             {"checkpoints/best.ckpt", "checkpoints/last.ckpt", "reports/accuracy.csv",
              "reports/curves.csv", "reports/wordfreq.csv", "vocab.txt"}) {
            if (sha256_file(dir_a / rel) != sha256_file(dir_b / rel)) {
                ok = false;
                std::cout << "       digest mismatch: " << base << " " << rel << "\n";
            }
        }
        const std::string hist = "reports/histogram_" + base + ".csv";
        const std::string scores = "scores/" + base + "_sst2_train.json";
        if (sha256_file(dir_a / hist) != sha256_file(dir_b / hist)) ok = false;
        if (sha256_file(dir_a / scores) != sha256_file(dir_b / scores)) ok = false;
    }
    report(ok, "criterion 6: identical seeds give bit-identical checkpoints, metrics, "
               "scores and reports (SHA-256)");
    return ok;
}

// ---- criteria 7-9: real-corpus gates ----------------------------------------

const char* env_or_null(const char* name) {
    const char* v = std::getenv(name);
    return (v != nullptr && *v != '\0') ? v : nullptr;
}

int skip(const std::string& what, const std::string& vars) {
    std::cout << "[SKIP] " << what << ": provide " << vars << "\n";
    return 77;
}

struct DeskEval {
    double lstm = 0.0, cnn = 0.0, ensemble = 0.0;
};

DeskEval train_eval_pair(const std::filesystem::path& workdir, const std::string& data_spec,
                         const std::string& eval_spec, Split eval_split,
                         const std::filesystem::path& glove, const TrainConfig& base_cfg,
                         std::size_t min_freq, std::size_t subsample, bool allow_partial) {
    std::filesystem::path scores_lstm, scores_cnn;
    for (ModelKind kind : {ModelKind::lstm, ModelKind::cnn}) {
        TrainOptions opts;
        opts.data_spec = data_spec;
        opts.glove_path = glove;
        opts.kind = kind;
        opts.cfg = base_cfg;
        opts.run_dir = workdir / (model_kind_name(kind) + "_seed" +
                                  std::to_string(base_cfg.seed));
        opts.min_freq = min_freq;
        opts.subsample_per_class = subsample;
        opts.allow_partial = allow_partial;
        const TrainOutcome outcome = run_train(opts);

        EvalOptions ev;
        ev.run_dir = outcome.run_dir;
        ev.data_spec = eval_spec;
        ev.split = eval_split;
        ev.allow_partial = allow_partial;
        const EvalOutcome eval = run_eval(ev);
        std::cout << "       " << model_kind_name(kind) << " seed " << base_cfg.seed
                  << " test accuracy " << format_double(eval.accuracy) << "\n";
        (kind == ModelKind::lstm ? scores_lstm : scores_cnn) = eval.scores_path;
    }

    EnsembleOptions ens;
    ens.scores_a = scores_lstm;
    ens.scores_b = scores_cnn;
    ens.out_dir = workdir / ("ensemble_seed" + std::to_string(base_cfg.seed));
    const EnsembleOutcome out = run_ensemble(ens);
    DeskEval result;
    result.lstm = out.table[0].accuracy;
    result.cnn = out.table[1].accuracy;
    result.ensemble = out.table[2].accuracy;
    std::cout << "       ensemble seed " << base_cfg.seed << " test accuracy "
              << format_double(result.ensemble) << "\n";
    return result;
}

int criterion_7() {
    const char* train_tsv = env_or_null("SENTISTACK_SST2_TRAIN");
    const char* test_tsv = env_or_null("SENTISTACK_SST2_TEST");
    const char* glove = env_or_null("SENTISTACK_GLOVE");
    if (train_tsv == nullptr || test_tsv == nullptr || glove == nullptr) {
        return skip("criterion 7 (SST2 desk-scale reproduction)",
                    "SENTISTACK_SST2_TRAIN, SENTISTACK_SST2_TEST, SENTISTACK_GLOVE");
    }

    // Vocabulary sanity: the sentence-level train split lands near 16k.
    const Dataset train = load_sst2(train_tsv, Split::train);
    const Vocabulary vocab = build_vocab(train, 1);
    const bool vocab_ok = vocab.size() >= 14000 && vocab.size() <= 18000;
    report(vocab_ok, "criterion 7a: SST2 train vocabulary size " +
                         std::to_string(vocab.size()) + " within [14000, 18000]");

    test_support::TempDir tmp("acceptance_sst2");
    TrainConfig cfg = TrainConfig::defaults_for("sst2");
    cfg.seed = 1;
    cfg.epochs = 25;  // reduced from 100 for desk runtime
    const DeskEval r =
        train_eval_pair(tmp.path(), std::string("sst2:") + train_tsv,
                        std::string("sst2:") + test_tsv, Split::test, glove, cfg,
                        /*min_freq=*/1, /*subsample=*/0, /*allow_partial=*/false);

    const double floor = 0.75;
    const bool gates = r.lstm >= floor && r.cnn >= floor &&
                       r.ensemble >= std::max(r.lstm, r.cnn) - 0.005;
    report(gates, "criterion 7: SST2 desk gates (lstm " + format_double(r.lstm) + ", cnn " +
                      format_double(r.cnn) + ", ensemble " + format_double(r.ensemble) +
                      "; each model >= 0.75, ensemble >= max - 0.005)");

    // Published reference accuracies are informational, not hard gates:
    // hidden sizes, FC widths, tokenization and embedding dimension are
    // free parameters of this reproduction.
    std::cout << "       reference targets 0.80 / 0.802 / 0.805 (+-3 points): lstm "
              << (std::abs(r.lstm - 0.80) <= 0.03 ? "within" : "outside") << ", cnn "
              << (std::abs(r.cnn - 0.802) <= 0.03 ? "within" : "outside") << ", ensemble "
              << (std::abs(r.ensemble - 0.805) <= 0.03 ? "within" : "outside") << "\n";

    return (vocab_ok && gates) ? 0 : 1;
}

int criterion_8() {
    const char* imdb_root = env_or_null("SENTISTACK_IMDB_ROOT");
    const char* glove = env_or_null("SENTISTACK_GLOVE");
    if (imdb_root == nullptr || glove == nullptr) {
        return skip("criterion 8 (IMDB subsample gates)",
                    "SENTISTACK_IMDB_ROOT, SENTISTACK_GLOVE");
    }

    // Full-scale Table-I numbers are declared not desk-reproducible; the
    // substitute gate trains on a seeded 2500/2500 subsample for 10 epochs
    // and evaluates on the full 25k test set. max_len is pinned to 200 to
    // keep the desk run within budget.
    test_support::TempDir tmp("acceptance_imdb");
    bool acc_gates = true;
    int ordering_hits = 0;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        TrainConfig cfg = TrainConfig::defaults_for("imdb");
        cfg.seed = seed;
        cfg.epochs = 10;
        cfg.max_len = 200;
        const DeskEval r = train_eval_pair(
            tmp.path(), std::string("imdb:") + imdb_root, std::string("imdb:") + imdb_root,
            Split::test, glove, cfg, /*min_freq=*/5, /*subsample=*/2500,
            /*allow_partial=*/false);
        if (!(r.lstm >= 0.75 && r.cnn >= 0.75 &&
              r.ensemble >= std::max(r.lstm, r.cnn) - 0.005)) {
            acc_gates = false;
        }
        if (r.ensemble >= r.lstm && r.ensemble >= r.cnn) ++ordering_hits;
    }
    const bool ordering = ordering_hits >= 2;
    report(acc_gates && ordering,
           "criterion 8: IMDB 2500/2500 subsample, 10 epochs, 3 seeds (accuracy floors "
           "and ensemble >= both constituents for " +
               std::to_string(ordering_hits) + "/3 seeds, need >= 2)");
    return (acc_gates && ordering) ? 0 : 1;
}

int criterion_9() {
    const char* imdb_root = env_or_null("SENTISTACK_IMDB_ROOT");
    if (imdb_root == nullptr) {
        return skip("criterion 9 (IMDB word-frequency report)", "SENTISTACK_IMDB_ROOT");
    }
    const ImdbPair pair = load_imdb(imdb_root, false);
    Dataset full = pair.train;
    full.examples.insert(full.examples.end(), pair.test.examples.begin(),
                         pair.test.examples.end());
    const WordFrequencyReport wf =
        word_frequency_report(full, default_wordfreq_exclusions(), 50);

    auto contains = [](const std::vector<std::pair<std::string, std::size_t>>& list,
                       const char* token) {
        for (const auto& [t, c] : list) {
            if (t == token) return true;
        }
        return false;
    };
    const bool ok = contains(wf.positive, "great") && contains(wf.positive, "well") &&
                    contains(wf.positive, "love") && contains(wf.negative, "bad");
    report(ok, "criterion 9: full-IMDB word frequencies (positive top-50 has great/well/"
               "love, negative top-50 has bad, default exclusions)");
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    std::string group = "core";
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criteria") == 0 && i + 1 < argc) {
            group = argv[++i];
        }
    }
    init_threads();

    try {
        if (group == "core") {
            criterion_1();
            criterion_2();
            criterion_3();
            criterion_4();
            criterion_5();
            criterion_6();
            return g_failures == 0 ? 0 : 1;
        }
        if (group == "sst2") return criterion_7();
        if (group == "imdb") return criterion_8();
        if (group == "wordfreq") return criterion_9();
    } catch (const Error& e) {
        std::cout << "[FAIL] unexpected error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "unknown criteria group \"" << group
              << "\" (expected core, sst2, imdb, wordfreq)\n";
    return 2;
}
