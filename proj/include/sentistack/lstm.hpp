#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sentistack/matrix.hpp"
#include "sentistack/rng.hpp"

namespace sentistack {

/// Named views over a model's parameter blocks, in a fixed enumeration order.
/// The same order is used for gradients, optimizer state and checkpoints.
using ParamRefs = std::vector<std::pair<std::string, Matrix*>>;
using ConstParamRefs = std::vector<std::pair<std::string, const Matrix*>>;

/// Weights of one LSTM cell: for each gate, an input projection W
/// (hidden x input), a recurrent projection U (hidden x hidden) and a bias
/// (hidden x 1). Doubles as the gradient buffer type.
struct LstmCellParams {
    Matrix W_f, W_i, W_o, W_c;
    Matrix U_f, U_i, U_o, U_c;
    Matrix b_f, b_i, b_o, b_c;

    static LstmCellParams zeros(std::size_t input_dim, std::size_t hidden_dim);

    std::size_t hidden_dim() const { return W_f.rows(); }
    std::size_t input_dim() const { return W_f.cols(); }

    void validate() const;
    void append_params(const std::string& prefix, ParamRefs* out);
};

/// Hidden and memory-cell state, one column per batch element.
struct LstmState {
    Matrix h;
    Matrix c;

    static LstmState zeros(std::size_t hidden_dim, std::size_t batch) {
        return {Matrix(hidden_dim, batch), Matrix(hidden_dim, batch)};
    }
};

/// Everything the backward pass needs from one forward step.
struct LstmCellCache {
    Matrix x, h_prev, c_prev;
    Matrix f, i, o, g;  // gate activations and candidate
    Matrix c, tanh_c;
    std::vector<double> mask;  // per-column 0/1; empty means all active
};

/// One step of the gated recurrence: forget/input/output gates squash affine
/// maps of (x_t, h_{t-1}) through the logistic, the memory cell blends its
/// previous value with a tanh candidate, and h_t = o_t * tanh(c_t).
///
/// Columns with mask 0 carry the previous state through unchanged, which is
/// what makes trailing padding invisible to the classifier. cache may be
/// null for inference.
LstmState lstm_cell_forward(const Matrix& x_t, const LstmState& prev,
                            const LstmCellParams& p, LstmCellCache* cache,
                            const std::vector<double>* mask = nullptr);

struct LstmCellBackResult {
    Matrix grad_x;
    LstmState grad_prev;
};

/// Exact gradients through one cell step. grad_h/grad_c are the loss
/// gradients w.r.t. the post-mask state; parameter gradients accumulate
/// into *grads. Throws ContractError if the cache does not match p.
LstmCellBackResult lstm_cell_backward(const Matrix& grad_h, const Matrix& grad_c,
                                      const LstmCellCache& cache,
                                      const LstmCellParams& p, LstmCellParams* grads);

// ---- bidirectional layer -----------------------------------------------

struct BiLstmLayerCache {
    std::vector<LstmCellCache> fwd_steps;  // in time order
    std::vector<LstmCellCache> bwd_steps;  // index t holds the step that read seq[t]
};

/// Runs one LSTM over the sequence as-is and another over its reversal, both
/// from zero states. Output t is vstack(h_fwd at t, h_bwd at t), that is, the
/// forward pass over tokens 1..t on top of the backward pass over T..t.
std::vector<Matrix> bilstm_layer_forward(const std::vector<Matrix>& seq,
                                         const LstmCellParams& fwd,
                                         const LstmCellParams& bwd,
                                         BiLstmLayerCache* cache,
                                         const std::vector<std::vector<double>>* masks = nullptr);

struct BiLstmLayerGrads {
    LstmCellParams fwd, bwd;
};

/// Backpropagation through time for both directions; returns the gradient
/// w.r.t. each input step.
std::vector<Matrix> bilstm_layer_backward(const std::vector<Matrix>& grad_out,
                                          const BiLstmLayerCache& cache,
                                          const LstmCellParams& fwd,
                                          const LstmCellParams& bwd,
                                          BiLstmLayerGrads* grads);

// ---- two-layer classifier ------------------------------------------------

/// Two stacked bidirectional layers plus an affine head over the
/// concatenated layer-2 state at each sequence's last real position.
struct BiLstmClassifier {
    LstmCellParams layer1_fwd, layer1_bwd;
    LstmCellParams layer2_fwd, layer2_bwd;  // input dim = 2*hidden
    Matrix head_W;                          // 2 x 2*hidden
    Matrix head_b;                          // 2 x 1

    static BiLstmClassifier zeros(std::size_t input_dim, std::size_t hidden_dim);

    /// Uniform [-k, k] with k = 1/sqrt(hidden); forget-gate biases start at
    /// 1.0 so early gradients survive long sequences, other biases at 0.
    static BiLstmClassifier init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng);

    std::size_t hidden_dim() const { return layer1_fwd.hidden_dim(); }
    std::size_t input_dim() const { return layer1_fwd.input_dim(); }

    void validate() const;
    ParamRefs params();
    ConstParamRefs params() const;
};

struct BiLstmForwardCache {
    BiLstmLayerCache layer1, layer2;
    std::vector<std::size_t> lengths;
    Matrix features;    // 2*hidden x batch readout
    Matrix probs_rows;  // batch x 2
    std::size_t steps = 0;
    std::size_t batch = 0;
};

/// Full forward pass: layer1 -> layer2 -> readout at each column's last
/// non-pad position -> affine head -> softmax. lengths[j] is the number of
/// real tokens in column j; positions >= length are treated as padding.
/// Returns class probabilities (2 x batch). Throws DataError if any length
/// is zero and ContractError on an empty sequence.
Matrix bilstm_classify_forward(const std::vector<Matrix>& seq,
                               const std::vector<std::size_t>& lengths,
                               const BiLstmClassifier& model, BiLstmForwardCache* cache);

struct BiLstmGrads {
    BiLstmLayerGrads layer1, layer2;
    Matrix head_W, head_b;

    static BiLstmGrads zeros_like(const BiLstmClassifier& model);
    ConstParamRefs params() const;
};

/// Exact gradients for every parameter block given dL/dprobs (2 x batch).
/// Returns dL/dseq for embedding fine-tuning.
std::vector<Matrix> bilstm_classify_backward(const Matrix& grad_probs,
                                             const BiLstmForwardCache& cache,
                                             const BiLstmClassifier& model,
                                             BiLstmGrads* grads);

}  // namespace sentistack
