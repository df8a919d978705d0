#include "sentistack/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <utility>

#include "sentistack/errors.hpp"

namespace sentistack {

std::string model_kind_name(ModelKind k) {
    return k == ModelKind::lstm ? "lstm" : "cnn";
}

ModelKind parse_model_kind(const std::string& s) {
    if (s == "lstm") return ModelKind::lstm;
    if (s == "cnn") return ModelKind::cnn;
    throw UsageError("unknown model kind \"" + s + "\" (expected lstm or cnn)");
}

void TrainConfig::validate() const {
    if (epochs < 1) throw UsageError("epochs must be >= 1");
    if (batch_size < 1) throw UsageError("batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw UsageError("learning_rate must be > 0");
    if (weight_decay < 0.0) throw UsageError("weight_decay must be >= 0");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
        throw UsageError("betas must lie in [0, 1)");
    }
    if (eps_adam <= 0.0) throw UsageError("eps_adam must be > 0");
    if (max_len < 4) throw UsageError("max_len must be >= 4 (maximum filter width)");
    if (hidden < 1 || hidden_fc < 1 || maps_per_bank < 1) {
        throw UsageError("hidden sizes must be >= 1");
    }
}

TrainConfig TrainConfig::defaults_for(const std::string& dataset_name) {
    TrainConfig cfg;
    if (dataset_name == "sst2") {
        cfg.batch_size = 64;
        cfg.max_len = 50;
    } else if (dataset_name == "imdb") {
        cfg.batch_size = 50;
        cfg.max_len = 400;
    }
    return cfg;
}

void adam_step(const ParamRefs& params, const std::vector<const Matrix*>& grads,
               AdamState& state, const TrainConfig& cfg) {
    if (params.size() != grads.size()) {
        throw ContractError("adam_step: " + std::to_string(params.size()) + " params vs " +
                            std::to_string(grads.size()) + " grads");
    }
    if (state.t == 0) {
        state.m.clear();
        state.v.clear();
        for (const auto& [name, p] : params) {
            state.m.emplace_back(p->rows(), p->cols());
            state.v.emplace_back(p->rows(), p->cols());
        }
    }
    if (state.m.size() != params.size()) {
        throw ContractError("adam_step: state holds " + std::to_string(state.m.size()) +
                            " blocks for " + std::to_string(params.size()) + " params");
    }
    state.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));

    for (std::size_t block = 0; block < params.size(); ++block) {
        const auto& [name, p] = params[block];
        const Matrix* g = grads[block];
        if (!p->same_shape(*g) || !p->same_shape(state.m[block])) {
            throw ShapeError("adam_step: block " + name + " param " + p->shape_str() +
                             " vs grad " + g->shape_str());
        }
        double* pd = p->data();
        const double* gd = g->data();
        double* md = state.m[block].data();
        double* vd = state.v[block].data();
        for (std::size_t idx = 0, n = p->size(); idx < n; ++idx) {
            const double gv = gd[idx] + cfg.weight_decay * pd[idx];
            if (!std::isfinite(gv)) {
                throw NumericError("adam_step: non-finite gradient in block " + name);
            }
            md[idx] = cfg.beta1 * md[idx] + (1.0 - cfg.beta1) * gv;
            vd[idx] = cfg.beta2 * vd[idx] + (1.0 - cfg.beta2) * gv * gv;
            const double m_hat = md[idx] / bc1;
            const double v_hat = vd[idx] / bc2;
            pd[idx] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.eps_adam);
        }
    }
}

std::vector<std::vector<std::size_t>> make_batches(const Dataset& ds,
                                                   std::size_t batch_size,
                                                   std::uint64_t seed, std::size_t epoch) {
    if (ds.examples.empty()) {
        throw DataError("make_batches: empty dataset");
    }
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix_seed(mix_seed(seed, 0x6261746368ULL), epoch));  // "batch" stream
    rng.shuffle(order);

    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const std::size_t end = std::min(start + batch_size, order.size());
        batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return batches;
}

ParamRefs ModelParams::net_params() {
    return kind == ModelKind::lstm ? lstm.params() : cnn.params();
}

ConstParamRefs ModelParams::net_params() const {
    ConstParamRefs refs;
    auto mut = const_cast<ModelParams*>(this)->net_params();
    refs.reserve(mut.size());
    for (auto& [name, m] : mut) refs.emplace_back(name, m);
    return refs;
}

namespace {

struct LstmBatch {
    std::vector<Matrix> seq;            // T matrices, d x B
    std::vector<std::size_t> lengths;   // per column
    std::vector<int> labels;
    std::vector<std::vector<std::size_t>> tokens;  // [t][j] vocab row, pad beyond length
};

LstmBatch build_lstm_batch(const Dataset& ds, const std::vector<std::size_t>& idx,
                           const Matrix& embeddings, std::size_t max_len) {
    LstmBatch batch;
    const std::size_t B = idx.size();
    std::size_t T = 1;
    batch.lengths.resize(B);
    batch.labels.resize(B);
    for (std::size_t j = 0; j < B; ++j) {
        const Example& ex = ds.examples[idx[j]];
        batch.lengths[j] = std::min(ex.token_indices.size(), max_len);
        batch.labels[j] = ex.label;
        T = std::max(T, batch.lengths[j]);
    }
    const std::size_t d = embeddings.cols();
    batch.seq.assign(T, Matrix(d, B));
    batch.tokens.assign(T, std::vector<std::size_t>(B, Vocabulary::kPadIndex));
    for (std::size_t j = 0; j < B; ++j) {
        const Example& ex = ds.examples[idx[j]];
        for (std::size_t t = 0; t < batch.lengths[j]; ++t) {
            const std::size_t row = ex.token_indices[t];
            batch.tokens[t][j] = row;
            const double* src = embeddings.row_ptr(row);
            for (std::size_t r = 0; r < d; ++r) batch.seq[t](r, j) = src[r];
        }
    }
    return batch;
}

// CNN consumes one example at a time; rows beyond the real length hold the
// zero pad embedding so every sequence reaches the maximum filter width.
Matrix build_cnn_input(const Example& ex, const Matrix& embeddings, std::size_t max_len,
                       std::size_t* real_len) {
    const std::size_t len = std::min(ex.token_indices.size(), max_len);
    const std::size_t T = std::max<std::size_t>(len, 4);
    const std::size_t d = embeddings.cols();
    Matrix seq(T, d);
    for (std::size_t t = 0; t < len; ++t) {
        const double* src = embeddings.row_ptr(ex.token_indices[t]);
        double* dst = seq.row_ptr(t);
        for (std::size_t r = 0; r < d; ++r) dst[r] = src[r];
    }
    *real_len = len;
    return seq;
}

struct BatchStats {
    double loss_sum = 0.0;  // loss * batch size
    std::size_t correct = 0;
};

// Positive iff the positive-class probability reaches the 0.5 cut-off.
inline bool predict_positive(double score) { return score >= 0.5; }

class LstmTrainer {
public:
    explicit LstmTrainer(ModelParams* model) : model_(model) {}

    BatchStats step(const Dataset& ds, const std::vector<std::size_t>& idx,
                    const TrainConfig& cfg, AdamState& adam) {
        const LstmBatch batch = build_lstm_batch(ds, idx, model_->embeddings, cfg.max_len);
        BiLstmForwardCache cache;
        const Matrix probs = bilstm_classify_forward(batch.seq, batch.lengths,
                                                     model_->lstm, &cache);
        BatchStats stats = score_batch(probs, batch.labels);

        const Matrix grad_probs =
            transpose(cross_entropy_grad(transpose(probs), batch.labels));
        BiLstmGrads grads = BiLstmGrads::zeros_like(model_->lstm);
        const std::vector<Matrix> grad_seq =
            bilstm_classify_backward(grad_probs, cache, model_->lstm, &grads);

        ParamRefs params = model_->lstm.params();
        ConstParamRefs grad_refs = grads.params();
        std::vector<const Matrix*> grad_ptrs;
        grad_ptrs.reserve(grad_refs.size() + 1);
        for (auto& [name, g] : grad_refs) grad_ptrs.push_back(g);

        Matrix embed_grad;
        if (cfg.fine_tune_embeddings) {
            embed_grad = Matrix(model_->embeddings.rows(), model_->embeddings.cols());
            for (std::size_t t = 0; t < grad_seq.size(); ++t) {
                for (std::size_t j = 0; j < batch.lengths.size(); ++j) {
                    if (t >= batch.lengths[j]) continue;
                    const std::size_t row = batch.tokens[t][j];
                    if (row == Vocabulary::kPadIndex) continue;  // pad row stays zero
                    double* dst = embed_grad.row_ptr(row);
                    for (std::size_t r = 0; r < embed_grad.cols(); ++r) {
                        dst[r] += grad_seq[t](r, j);
                    }
                }
            }
            params.emplace_back("embeddings", &model_->embeddings);
            grad_ptrs.push_back(&embed_grad);
        }
        adam_step(params, grad_ptrs, adam, cfg);
        return stats;
    }

    BatchStats score_batch(const Matrix& probs, const std::vector<int>& labels) {
        BatchStats stats;
        stats.loss_sum = cross_entropy(transpose(probs), labels) *
                         static_cast<double>(labels.size());
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (predict_positive(probs(1, j)) == (labels[j] == 1)) ++stats.correct;
        }
        return stats;
    }

private:
    ModelParams* model_;
};

class CnnTrainer {
public:
    explicit CnnTrainer(ModelParams* model) : model_(model) {}

    BatchStats step(const Dataset& ds, const std::vector<std::size_t>& idx,
                    const TrainConfig& cfg, AdamState& adam) {
        BatchStats stats;
        CnnParams grads = CnnParams::zeros(model_->cnn.embed_dim(),
                                           model_->cnn.maps_per_bank(),
                                           model_->cnn.hidden_fc());
        Matrix embed_grad;
        if (cfg.fine_tune_embeddings) {
            embed_grad = Matrix(model_->embeddings.rows(), model_->embeddings.cols());
        }
        Matrix probs_rows(idx.size(), 2);
        std::vector<int> labels(idx.size());

        for (std::size_t n = 0; n < idx.size(); ++n) {
            const Example& ex = ds.examples[idx[n]];
            std::size_t len = 0;
            const Matrix seq = build_cnn_input(ex, model_->embeddings, cfg.max_len, &len);
            CnnForwardCache cache;
            const Matrix probs = cnn_classify_forward(seq, model_->cnn, &cache);
            probs_rows(n, 0) = probs(0, 0);
            probs_rows(n, 1) = probs(1, 0);
            labels[n] = ex.label;

            // Per-example loss contributes 1/B to the batch mean.
            Matrix grad_probs(2, 1);
            const auto y = static_cast<std::size_t>(ex.label);
            const double p_true = probs(y, 0);
            grad_probs(y, 0) = p_true < kProbFloor
                                   ? 0.0
                                   : -1.0 / (p_true * static_cast<double>(idx.size()));
            const Matrix dseq = cnn_classify_backward(grad_probs, cache, model_->cnn, &grads);

            if (cfg.fine_tune_embeddings) {
                for (std::size_t t = 0; t < len; ++t) {
                    const std::size_t row = ex.token_indices[t];
                    if (row == Vocabulary::kPadIndex) continue;
                    double* dst = embed_grad.row_ptr(row);
                    for (std::size_t r = 0; r < embed_grad.cols(); ++r) {
                        dst[r] += dseq(t, r);
                    }
                }
            }
        }
        stats.loss_sum = cross_entropy(probs_rows, labels) * static_cast<double>(idx.size());
        for (std::size_t n = 0; n < labels.size(); ++n) {
            if (predict_positive(probs_rows(n, 1)) == (labels[n] == 1)) ++stats.correct;
        }

        ParamRefs params = model_->cnn.params();
        ConstParamRefs grad_refs = std::as_const(grads).params();
        std::vector<const Matrix*> grad_ptrs;
        for (auto& [name, g] : grad_refs) grad_ptrs.push_back(g);
        if (cfg.fine_tune_embeddings) {
            params.emplace_back("embeddings", &model_->embeddings);
            grad_ptrs.push_back(&embed_grad);
        }
        adam_step(params, grad_ptrs, adam, cfg);
        return stats;
    }

private:
    ModelParams* model_;
};

void check_indexed(const Dataset& ds) {
    for (const auto& ex : ds.examples) {
        if (ex.token_indices.empty()) {
            throw ContractError("dataset example " + ex.source_id +
                                " has no token indices; run index_dataset first");
        }
    }
}

}  // namespace

TrainResult train_model(ModelKind kind, const Dataset& train, const TrainConfig& cfg,
                        const EmbeddingMatrix& embeddings, const std::string& vocab_hash,
                        const EpochSink& sink) {
    cfg.validate();
    if (train.examples.empty()) {
        throw DataError("train_model: empty training set");
    }
    check_indexed(train);

    TrainResult result;
    ModelParams& model = result.params;
    model.kind = kind;
    model.embeddings = embeddings.vectors;
    model.embed_dim = embeddings.dim;
    model.vocab_hash = vocab_hash;
    model.cfg = cfg;

    Rng init_rng(mix_seed(cfg.seed, 0x696e6974ULL));  // "init" stream
    if (kind == ModelKind::lstm) {
        model.lstm = BiLstmClassifier::init(embeddings.dim, cfg.hidden, init_rng);
    } else {
        model.cnn = CnnParams::init(embeddings.dim, cfg.maps_per_bank, cfg.hidden_fc,
                                    init_rng);
    }

    AdamState adam;
    LstmTrainer lstm_trainer(&model);
    CnnTrainer cnn_trainer(&model);
    double best_accuracy = -1.0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        const auto batches = make_batches(train, cfg.batch_size, cfg.seed, epoch);
        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (const auto& batch : batches) {
            const BatchStats stats = kind == ModelKind::lstm
                                         ? lstm_trainer.step(train, batch, cfg, adam)
                                         : cnn_trainer.step(train, batch, cfg, adam);
            if (!std::isfinite(stats.loss_sum)) {
                throw NumericError("train_model: non-finite loss at epoch " +
                                   std::to_string(epoch) +
                                   "; last good checkpoint retained");
            }
            loss_sum += stats.loss_sum;
            correct += stats.correct;
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(train.size());
        rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(train.size());
        rec.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.history.push_back(rec);

        const bool is_best = rec.train_accuracy > best_accuracy;
        if (is_best) best_accuracy = rec.train_accuracy;
        if (sink) sink(rec, model, is_best);
    }
    return result;
}

EvalResult evaluate(const ModelParams& model, const Dataset& ds) {
    if (ds.examples.empty()) {
        throw DataError("evaluate: empty dataset");
    }
    check_indexed(ds);
    const TrainConfig& cfg = model.cfg;

    EvalResult result;
    result.scores.reserve(ds.size());
    std::size_t correct = 0;

    if (model.kind == ModelKind::lstm) {
        std::vector<std::size_t> idx;
        for (std::size_t start = 0; start < ds.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, ds.size());
            idx.resize(end - start);
            std::iota(idx.begin(), idx.end(), start);
            const LstmBatch batch = build_lstm_batch(ds, idx, model.embeddings, cfg.max_len);
            const Matrix probs =
                bilstm_classify_forward(batch.seq, batch.lengths, model.lstm, nullptr);
            for (std::size_t j = 0; j < idx.size(); ++j) {
                const double score = probs(1, j);
                result.scores.push_back(score);
                if (predict_positive(score) == (batch.labels[j] == 1)) ++correct;
            }
        }
    } else {
        for (const auto& ex : ds.examples) {
            std::size_t len = 0;
            const Matrix seq = build_cnn_input(ex, model.embeddings, cfg.max_len, &len);
            const Matrix probs = cnn_classify_forward(seq, model.cnn, nullptr);
            const double score = probs(1, 0);
            result.scores.push_back(score);
            if (predict_positive(score) == (ex.label == 1)) ++correct;
        }
    }
    result.accuracy = static_cast<double>(correct) / static_cast<double>(ds.size());
    return result;
}

}  // namespace sentistack
