#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sentistack/cnn.hpp"
#include "sentistack/dataset.hpp"
#include "sentistack/glove.hpp"
#include "sentistack/lstm.hpp"
#include "sentistack/matrix.hpp"

namespace sentistack {

enum class ModelKind { lstm, cnn };

std::string model_kind_name(ModelKind k);
ModelKind parse_model_kind(const std::string& s);

/// Every training hyperparameter. Defaults follow the reference recipe:
/// Adam at learning rate 1e-4 with weight decay 1e-5, 100 epochs, batch 64
/// for sst2 and 50 for imdb.
struct TrainConfig {
    std::uint64_t seed = 0;
    std::size_t epochs = 100;
    std::size_t batch_size = 64;
    double learning_rate = 1e-4;
    double weight_decay = 1e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_adam = 1e-8;
    std::size_t max_len = 400;
    std::size_t hidden = 128;
    std::size_t hidden_fc = 100;
    std::size_t maps_per_bank = 100;
    bool fine_tune_embeddings = true;

    /// Throws UsageError on violated invariants (epochs >= 1, batch_size >=
    /// 1, learning_rate > 0, betas in [0,1)).
    void validate() const;

    /// Dataset-dependent defaults: sst2 -> batch 64 / max_len 50;
    /// imdb -> batch 50 / max_len 400.
    static TrainConfig defaults_for(const std::string& dataset_name);
};

/// First/second moment buffers plus the shared step counter. Lazily shaped
/// on the first apply.
struct AdamState {
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    std::uint64_t t = 0;
};

/// One optimizer step over aligned (params, grads) lists: the L2 term
/// weight_decay*param is folded into each gradient, then the standard
/// bias-corrected update applies. Throws NumericError naming the block on a
/// non-finite gradient.
void adam_step(const ParamRefs& params, const std::vector<const Matrix*>& grads,
               AdamState& state, const TrainConfig& cfg);

/// Deterministic epoch batching: a Fisher-Yates shuffle keyed by
/// (seed, epoch), chunked into batch_size groups, final short batch kept.
std::vector<std::vector<std::size_t>> make_batches(const Dataset& ds,
                                                   std::size_t batch_size,
                                                   std::uint64_t seed, std::size_t epoch);

struct EpochRecord {
    std::size_t epoch = 0;
    double train_accuracy = 0.0;
    double train_loss = 0.0;
    double wall_time = 0.0;  // seconds
};

/// A trained model: the network parameters, the (possibly fine-tuned)
/// embedding table, and enough metadata to validate compatibility later.
struct ModelParams {
    ModelKind kind = ModelKind::lstm;
    BiLstmClassifier lstm;  // meaningful when kind == lstm
    CnnParams cnn;          // meaningful when kind == cnn
    Matrix embeddings;      // vocab_size x dim
    std::size_t embed_dim = 0;
    std::string vocab_hash;
    TrainConfig cfg;

    ParamRefs net_params();
    ConstParamRefs net_params() const;
};

/// Called after every epoch with the record, the current parameters, and
/// whether this epoch set a new best train accuracy.
using EpochSink = std::function<void(const EpochRecord&, const ModelParams&, bool)>;

struct TrainResult {
    ModelParams params;
    std::vector<EpochRecord> history;
};

/// Runs the full epoch loop: shuffled mini-batches, forward/backward, one
/// Adam step per batch, per-epoch accuracy/loss tracking. Training is a pure
/// function of (dataset, config, embeddings): identical seeds give
/// bit-identical parameters. A non-finite loss aborts with NumericError; the
/// sink has already persisted the last good epoch by then.
TrainResult train_model(ModelKind kind, const Dataset& train, const TrainConfig& cfg,
                        const EmbeddingMatrix& embeddings, const std::string& vocab_hash,
                        const EpochSink& sink = nullptr);

struct EvalResult {
    double accuracy = 0.0;
    std::vector<double> scores;  // positive-class probability per example
};

/// Scores every example and applies the 0.5 decision threshold (ties
/// classify positive). Throws DataError on an empty dataset.
EvalResult evaluate(const ModelParams& model, const Dataset& ds);

}  // namespace sentistack
