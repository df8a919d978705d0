#pragma once

#include <cstddef>
#include <vector>

#include "sentistack/lstm.hpp"  // ParamRefs
#include "sentistack/matrix.hpp"
#include "sentistack/rng.hpp"

namespace sentistack {

/// One convolution bank: `maps` filters spanning `width` consecutive token
/// embeddings. W is (maps x width*d), b is (maps x 1).
struct ConvBank {
    std::size_t width = 0;
    Matrix W;
    Matrix b;
};

/// Text classifier with parallel filter banks of widths 1..4, max-over-time
/// pooling, a relu fully-connected layer and an affine layer into softmax.
struct CnnParams {
    std::vector<ConvBank> banks;  // widths 1,2,3,4 in order
    Matrix fc1_W, fc1_b;          // hidden_fc x 4*maps
    Matrix fc2_W, fc2_b;          // 2 x hidden_fc

    static CnnParams zeros(std::size_t embed_dim, std::size_t maps_per_bank,
                           std::size_t hidden_fc);

    /// Uniform [-k, k] with k = 1/sqrt(fan_in) per block; biases start at 0.
    static CnnParams init(std::size_t embed_dim, std::size_t maps_per_bank,
                          std::size_t hidden_fc, Rng& rng);

    std::size_t maps_per_bank() const { return banks.empty() ? 0 : banks[0].W.rows(); }
    std::size_t embed_dim() const {
        return banks.empty() ? 0 : banks[0].W.cols() / banks[0].width;
    }
    std::size_t hidden_fc() const { return fc1_W.rows(); }

    void validate() const;
    ParamRefs params();
    ConstParamRefs params() const;
};

/// Valid convolution, stride 1: output column j is
/// relu(W * flatten(embedding rows j..j+width-1) + b). seq_embed is
/// (T x d) with one row per token. Requires T >= width (ShapeError).
/// pre_relu, when non-null, receives the pre-activation for backward.
Matrix conv_text_forward(const Matrix& seq_embed, const ConvBank& bank, Matrix* pre_relu);

struct MaxPoolResult {
    Matrix values;                   // rows x 1
    std::vector<std::size_t> argmax;  // first occurrence per row
};

/// Per-row maximum over columns with the first-occurrence index retained for
/// backward routing. L must be >= 1 (ContractError).
MaxPoolResult max_over_time(const Matrix& feat);

struct CnnForwardCache {
    Matrix seq_embed;
    std::vector<Matrix> window_mats;  // im2col per bank: (width*d) x L
    std::vector<Matrix> conv_pre;     // pre-relu per bank
    std::vector<MaxPoolResult> pools;
    Matrix pooled;     // 4*maps x 1
    Matrix fc1_pre;    // hidden_fc x 1
    Matrix fc1_act;
    Matrix probs_rows;  // 1 x 2
};

/// Full forward: four banks -> max-over-time -> concat -> relu FC -> affine
/// FC -> softmax. Returns probabilities (2 x 1). T must be >= 4
/// (ContractError); padding upstream guarantees that for real data.
Matrix cnn_classify_forward(const Matrix& seq_embed, const CnnParams& p,
                            CnnForwardCache* cache);

/// Exact gradients for all parameter blocks given dL/dprobs (2 x 1); max-pool
/// routes gradient only to the stored argmax columns. Returns dL/dseq_embed.
Matrix cnn_classify_backward(const Matrix& grad_probs, const CnnForwardCache& cache,
                             const CnnParams& p, CnnParams* grads);

}  // namespace sentistack
