#include "sentistack/lstm.hpp"

#include <cmath>

#include "sentistack/errors.hpp"

namespace sentistack {

LstmCellParams LstmCellParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
    LstmCellParams p;
    p.W_f = p.W_i = p.W_o = p.W_c = Matrix(hidden_dim, input_dim);
    p.U_f = p.U_i = p.U_o = p.U_c = Matrix(hidden_dim, hidden_dim);
    p.b_f = p.b_i = p.b_o = p.b_c = Matrix(hidden_dim, 1);
    return p;
}

void LstmCellParams::validate() const {
    const std::size_t h = W_f.rows(), d = W_f.cols();
    for (const Matrix* m : {&W_i, &W_o, &W_c}) {
        if (m->rows() != h || m->cols() != d) {
            throw ShapeError("lstm cell: W blocks disagree, " + W_f.shape_str() + " vs " +
                             m->shape_str());
        }
    }
    for (const Matrix* m : {&U_f, &U_i, &U_o, &U_c}) {
        if (m->rows() != h || m->cols() != h) {
            throw ShapeError("lstm cell: U block " + m->shape_str() + " for hidden " +
                             std::to_string(h));
        }
    }
    for (const Matrix* m : {&b_f, &b_i, &b_o, &b_c}) {
        if (m->rows() != h || m->cols() != 1) {
            throw ShapeError("lstm cell: bias " + m->shape_str() + " for hidden " +
                             std::to_string(h));
        }
    }
}

void LstmCellParams::append_params(const std::string& prefix, ParamRefs* out) {
    out->emplace_back(prefix + ".W_f", &W_f);
    out->emplace_back(prefix + ".W_i", &W_i);
    out->emplace_back(prefix + ".W_o", &W_o);
    out->emplace_back(prefix + ".W_c", &W_c);
    out->emplace_back(prefix + ".U_f", &U_f);
    out->emplace_back(prefix + ".U_i", &U_i);
    out->emplace_back(prefix + ".U_o", &U_o);
    out->emplace_back(prefix + ".U_c", &U_c);
    out->emplace_back(prefix + ".b_f", &b_f);
    out->emplace_back(prefix + ".b_i", &b_i);
    out->emplace_back(prefix + ".b_o", &b_o);
    out->emplace_back(prefix + ".b_c", &b_c);
}

namespace {

// pre-activation: W x + U h_prev + b
Matrix gate_pre(const Matrix& W, const Matrix& x, const Matrix& U, const Matrix& h_prev,
                const Matrix& b) {
    Matrix pre = matmul(W, x);
    add_inplace(pre, matmul(U, h_prev));
    add_col_broadcast_inplace(pre, b);
    return pre;
}

void apply_column_mask(Matrix& next, const Matrix& prev, const std::vector<double>& mask) {
    for (std::size_t i = 0; i < next.rows(); ++i) {
        double* n = next.row_ptr(i);
        const double* p = prev.row_ptr(i);
        for (std::size_t j = 0; j < next.cols(); ++j) {
            if (mask[j] == 0.0) n[j] = p[j];
        }
    }
}

void zero_masked_columns(Matrix& m, const std::vector<double>& mask) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double* row = m.row_ptr(i);
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (mask[j] == 0.0) row[j] = 0.0;
        }
    }
}

void add_masked_columns(Matrix& dst, const Matrix& src, const std::vector<double>& mask) {
    for (std::size_t i = 0; i < dst.rows(); ++i) {
        double* d = dst.row_ptr(i);
        const double* s = src.row_ptr(i);
        for (std::size_t j = 0; j < dst.cols(); ++j) {
            if (mask[j] == 0.0) d[j] += s[j];
        }
    }
}

}  // namespace

LstmState lstm_cell_forward(const Matrix& x_t, const LstmState& prev,
                            const LstmCellParams& p, LstmCellCache* cache,
                            const std::vector<double>* mask) {
    if (x_t.rows() != p.input_dim()) {
        throw ShapeError("lstm_cell_forward: input " + x_t.shape_str() +
                         " does not match W " + p.W_f.shape_str());
    }
    if (prev.h.rows() != p.hidden_dim() || !prev.h.same_shape(prev.c) ||
        prev.h.cols() != x_t.cols()) {
        throw ShapeError("lstm_cell_forward: state " + prev.h.shape_str() +
                         " inconsistent with input " + x_t.shape_str() + " and hidden " +
                         std::to_string(p.hidden_dim()));
    }
    if (mask != nullptr && mask->size() != x_t.cols()) {
        throw ShapeError("lstm_cell_forward: mask size " + std::to_string(mask->size()) +
                         " for batch " + std::to_string(x_t.cols()));
    }

    const Matrix f = sigmoid(gate_pre(p.W_f, x_t, p.U_f, prev.h, p.b_f));
    const Matrix i = sigmoid(gate_pre(p.W_i, x_t, p.U_i, prev.h, p.b_i));
    const Matrix o = sigmoid(gate_pre(p.W_o, x_t, p.U_o, prev.h, p.b_o));
    const Matrix g = tanh_elem(gate_pre(p.W_c, x_t, p.U_c, prev.h, p.b_c));

    Matrix c = hadamard(f, prev.c);
    add_inplace(c, hadamard(i, g));
    const Matrix tanh_c = tanh_elem(c);
    Matrix h = hadamard(o, tanh_c);

    LstmState next{std::move(h), c};
    if (mask != nullptr) {
        apply_column_mask(next.h, prev.h, *mask);
        apply_column_mask(next.c, prev.c, *mask);
    }

    if (cache != nullptr) {
        cache->x = x_t;
        cache->h_prev = prev.h;
        cache->c_prev = prev.c;
        cache->f = f;
        cache->i = i;
        cache->o = o;
        cache->g = g;
        cache->c = c;
        cache->tanh_c = tanh_c;
        cache->mask = mask != nullptr ? *mask : std::vector<double>();
    }
    return next;
}

LstmCellBackResult lstm_cell_backward(const Matrix& grad_h, const Matrix& grad_c,
                                      const LstmCellCache& cache,
                                      const LstmCellParams& p, LstmCellParams* grads) {
    if (cache.f.rows() != p.hidden_dim() || cache.x.rows() != p.input_dim()) {
        throw ContractError("lstm_cell_backward: cache does not match parameters (cache " +
                            cache.f.shape_str() + ", hidden " +
                            std::to_string(p.hidden_dim()) + ")");
    }
    if (!grad_h.same_shape(cache.f) || !grad_c.same_shape(cache.f)) {
        throw ShapeError("lstm_cell_backward: upstream gradients " + grad_h.shape_str() +
                         "/" + grad_c.shape_str() + " vs cache " + cache.f.shape_str());
    }

    // Gradients w.r.t. the pre-mask candidate state; masked columns carry the
    // upstream gradient straight to the previous state instead.
    Matrix dh = grad_h;
    Matrix dc_in = grad_c;
    LstmCellBackResult result;
    result.grad_prev.h = Matrix(grad_h.rows(), grad_h.cols());
    result.grad_prev.c = Matrix(grad_h.rows(), grad_h.cols());
    if (!cache.mask.empty()) {
        add_masked_columns(result.grad_prev.h, grad_h, cache.mask);
        add_masked_columns(result.grad_prev.c, grad_c, cache.mask);
        zero_masked_columns(dh, cache.mask);
        zero_masked_columns(dc_in, cache.mask);
    }

    // h = o * tanh(c)
    Matrix d_o = hadamard(dh, cache.tanh_c);
    Matrix dc = dc_in;
    {
        // + dh * o * (1 - tanh(c)^2)
        Matrix t = hadamard(dh, cache.o);
        Matrix one_minus_t2 = hadamard(cache.tanh_c, cache.tanh_c);
        scale_inplace(one_minus_t2, -1.0);
        for (std::size_t k = 0; k < one_minus_t2.size(); ++k) one_minus_t2.data()[k] += 1.0;
        add_inplace(dc, hadamard(t, one_minus_t2));
    }

    // c = f * c_prev + i * g
    Matrix d_f = hadamard(dc, cache.c_prev);
    Matrix d_i = hadamard(dc, cache.g);
    Matrix d_g = hadamard(dc, cache.i);
    add_inplace(result.grad_prev.c, hadamard(dc, cache.f));

    // Through the nonlinearities: sigma' = s(1-s), tanh' = 1 - g^2.
    auto sigmoid_back = [](const Matrix& d, const Matrix& s) {
        Matrix out = d;
        for (std::size_t k = 0; k < out.size(); ++k) {
            const double sv = s.data()[k];
            out.data()[k] *= sv * (1.0 - sv);
        }
        return out;
    };
    Matrix da_f = sigmoid_back(d_f, cache.f);
    Matrix da_i = sigmoid_back(d_i, cache.i);
    Matrix da_o = sigmoid_back(d_o, cache.o);
    Matrix da_c = d_g;
    for (std::size_t k = 0; k < da_c.size(); ++k) {
        const double gv = cache.g.data()[k];
        da_c.data()[k] *= 1.0 - gv * gv;
    }

    // Parameter gradients accumulate; dW = da x^T, dU = da h_prev^T, db = rowsum(da).
    add_inplace(grads->W_f, matmul_nt(da_f, cache.x));
    add_inplace(grads->W_i, matmul_nt(da_i, cache.x));
    add_inplace(grads->W_o, matmul_nt(da_o, cache.x));
    add_inplace(grads->W_c, matmul_nt(da_c, cache.x));
    add_inplace(grads->U_f, matmul_nt(da_f, cache.h_prev));
    add_inplace(grads->U_i, matmul_nt(da_i, cache.h_prev));
    add_inplace(grads->U_o, matmul_nt(da_o, cache.h_prev));
    add_inplace(grads->U_c, matmul_nt(da_c, cache.h_prev));
    add_inplace(grads->b_f, row_sum(da_f));
    add_inplace(grads->b_i, row_sum(da_i));
    add_inplace(grads->b_o, row_sum(da_o));
    add_inplace(grads->b_c, row_sum(da_c));

    result.grad_x = matmul_tn(p.W_f, da_f);
    add_inplace(result.grad_x, matmul_tn(p.W_i, da_i));
    add_inplace(result.grad_x, matmul_tn(p.W_o, da_o));
    add_inplace(result.grad_x, matmul_tn(p.W_c, da_c));

    add_inplace(result.grad_prev.h, matmul_tn(p.U_f, da_f));
    add_inplace(result.grad_prev.h, matmul_tn(p.U_i, da_i));
    add_inplace(result.grad_prev.h, matmul_tn(p.U_o, da_o));
    add_inplace(result.grad_prev.h, matmul_tn(p.U_c, da_c));
    return result;
}

std::vector<Matrix> bilstm_layer_forward(const std::vector<Matrix>& seq,
                                         const LstmCellParams& fwd,
                                         const LstmCellParams& bwd,
                                         BiLstmLayerCache* cache,
                                         const std::vector<std::vector<double>>* masks) {
    if (seq.empty()) {
        throw ContractError("bilstm_layer_forward: empty sequence");
    }
    if (masks != nullptr && masks->size() != seq.size()) {
        throw ShapeError("bilstm_layer_forward: " + std::to_string(masks->size()) +
                         " masks for " + std::to_string(seq.size()) + " steps");
    }
    const std::size_t steps = seq.size();
    const std::size_t batch = seq[0].cols();
    const std::size_t hidden = fwd.hidden_dim();

    if (cache != nullptr) {
        cache->fwd_steps.assign(steps, LstmCellCache{});
        cache->bwd_steps.assign(steps, LstmCellCache{});
    }

    std::vector<Matrix> h_fwd(steps), h_bwd(steps);
    LstmState state = LstmState::zeros(hidden, batch);
    for (std::size_t t = 0; t < steps; ++t) {
        const std::vector<double>* m = masks != nullptr ? &(*masks)[t] : nullptr;
        state = lstm_cell_forward(seq[t], state, fwd,
                                  cache != nullptr ? &cache->fwd_steps[t] : nullptr, m);
        h_fwd[t] = state.h;
    }
    state = LstmState::zeros(hidden, batch);
    for (std::size_t t = steps; t-- > 0;) {
        const std::vector<double>* m = masks != nullptr ? &(*masks)[t] : nullptr;
        state = lstm_cell_forward(seq[t], state, bwd,
                                  cache != nullptr ? &cache->bwd_steps[t] : nullptr, m);
        h_bwd[t] = state.h;
    }

    std::vector<Matrix> out(steps);
    for (std::size_t t = 0; t < steps; ++t) out[t] = vstack(h_fwd[t], h_bwd[t]);
    return out;
}

std::vector<Matrix> bilstm_layer_backward(const std::vector<Matrix>& grad_out,
                                          const BiLstmLayerCache& cache,
                                          const LstmCellParams& fwd,
                                          const LstmCellParams& bwd,
                                          BiLstmLayerGrads* grads) {
    const std::size_t steps = grad_out.size();
    if (steps == 0 || cache.fwd_steps.size() != steps || cache.bwd_steps.size() != steps) {
        throw ContractError("bilstm_layer_backward: cache holds " +
                            std::to_string(cache.fwd_steps.size()) + " steps, upstream " +
                            std::to_string(steps));
    }
    const std::size_t hidden = fwd.hidden_dim();
    const std::size_t batch = grad_out[0].cols();

    auto slice_rows = [](const Matrix& m, std::size_t r0, std::size_t r1) {
        Matrix out(r1 - r0, m.cols());
        for (std::size_t i = r0; i < r1; ++i) {
            for (std::size_t j = 0; j < m.cols(); ++j) out(i - r0, j) = m(i, j);
        }
        return out;
    };

    std::vector<Matrix> grad_seq(steps);

    // Forward direction: walk time backwards carrying state gradients.
    Matrix dh_carry(hidden, batch), dc_carry(hidden, batch);
    for (std::size_t t = steps; t-- > 0;) {
        Matrix dh = slice_rows(grad_out[t], 0, hidden);
        add_inplace(dh, dh_carry);
        auto back = lstm_cell_backward(dh, dc_carry, cache.fwd_steps[t], fwd, &grads->fwd);
        grad_seq[t] = std::move(back.grad_x);
        dh_carry = std::move(back.grad_prev.h);
        dc_carry = std::move(back.grad_prev.c);
    }

    // Reverse direction processed steps T-1..0, so backprop visits 0..T-1.
    dh_carry = Matrix(hidden, batch);
    dc_carry = Matrix(hidden, batch);
    for (std::size_t t = 0; t < steps; ++t) {
        Matrix dh = slice_rows(grad_out[t], hidden, 2 * hidden);
        add_inplace(dh, dh_carry);
        auto back = lstm_cell_backward(dh, dc_carry, cache.bwd_steps[t], bwd, &grads->bwd);
        add_inplace(grad_seq[t], back.grad_x);
        dh_carry = std::move(back.grad_prev.h);
        dc_carry = std::move(back.grad_prev.c);
    }
    return grad_seq;
}

BiLstmClassifier BiLstmClassifier::zeros(std::size_t input_dim, std::size_t hidden_dim) {
    BiLstmClassifier m;
    m.layer1_fwd = LstmCellParams::zeros(input_dim, hidden_dim);
    m.layer1_bwd = LstmCellParams::zeros(input_dim, hidden_dim);
    m.layer2_fwd = LstmCellParams::zeros(2 * hidden_dim, hidden_dim);
    m.layer2_bwd = LstmCellParams::zeros(2 * hidden_dim, hidden_dim);
    m.head_W = Matrix(2, 2 * hidden_dim);
    m.head_b = Matrix(2, 1);
    return m;
}

BiLstmClassifier BiLstmClassifier::init(std::size_t input_dim, std::size_t hidden_dim,
                                        Rng& rng) {
    BiLstmClassifier m = zeros(input_dim, hidden_dim);
    const double k = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    for (auto& [name, mat] : m.params()) {
        const bool is_forget_bias = name.ends_with(".b_f");
        const bool is_bias = name.find(".b_") != std::string::npos || name == "head_b";
        if (is_forget_bias) {
            mat->fill(1.0);
        } else if (is_bias) {
            mat->fill(0.0);
        } else {
            for (std::size_t idx = 0; idx < mat->size(); ++idx) {
                mat->data()[idx] = rng.uniform(-k, k);
            }
        }
    }
    return m;
}

void BiLstmClassifier::validate() const {
    layer1_fwd.validate();
    layer1_bwd.validate();
    layer2_fwd.validate();
    layer2_bwd.validate();
    const std::size_t h = hidden_dim();
    if (layer1_bwd.hidden_dim() != h || layer2_fwd.hidden_dim() != h ||
        layer2_bwd.hidden_dim() != h) {
        throw ShapeError("bilstm: hidden sizes disagree across cells");
    }
    if (layer1_bwd.input_dim() != layer1_fwd.input_dim()) {
        throw ShapeError("bilstm: layer-1 input dims disagree");
    }
    if (layer2_fwd.input_dim() != 2 * h || layer2_bwd.input_dim() != 2 * h) {
        throw ShapeError("bilstm: layer-2 input dim must be 2*hidden = " +
                         std::to_string(2 * h));
    }
    if (head_W.rows() != 2 || head_W.cols() != 2 * h || head_b.rows() != 2 ||
        head_b.cols() != 1) {
        throw ShapeError("bilstm: head " + head_W.shape_str() + " / " + head_b.shape_str() +
                         " for hidden " + std::to_string(h));
    }
}

ParamRefs BiLstmClassifier::params() {
    ParamRefs refs;
    layer1_fwd.append_params("layer1_fwd", &refs);
    layer1_bwd.append_params("layer1_bwd", &refs);
    layer2_fwd.append_params("layer2_fwd", &refs);
    layer2_bwd.append_params("layer2_bwd", &refs);
    refs.emplace_back("head_W", &head_W);
    refs.emplace_back("head_b", &head_b);
    return refs;
}

ConstParamRefs BiLstmClassifier::params() const {
    ConstParamRefs refs;
    auto mutable_refs = const_cast<BiLstmClassifier*>(this)->params();
    refs.reserve(mutable_refs.size());
    for (auto& [name, mat] : mutable_refs) refs.emplace_back(name, mat);
    return refs;
}

Matrix bilstm_classify_forward(const std::vector<Matrix>& seq,
                               const std::vector<std::size_t>& lengths,
                               const BiLstmClassifier& model, BiLstmForwardCache* cache) {
    if (seq.empty()) {
        throw ContractError("bilstm_classify_forward: empty sequence");
    }
    model.validate();
    const std::size_t steps = seq.size();
    const std::size_t batch = seq[0].cols();
    const std::size_t hidden = model.hidden_dim();
    if (lengths.size() != batch) {
        throw ShapeError("bilstm_classify_forward: " + std::to_string(lengths.size()) +
                         " lengths for batch " + std::to_string(batch));
    }
    for (std::size_t j = 0; j < batch; ++j) {
        if (lengths[j] == 0) {
            throw DataError("bilstm_classify_forward: all-pad sequence at column " +
                            std::to_string(j));
        }
        if (lengths[j] > steps) {
            throw ShapeError("bilstm_classify_forward: length " +
                             std::to_string(lengths[j]) + " exceeds steps " +
                             std::to_string(steps));
        }
    }

    std::vector<std::vector<double>> masks(steps, std::vector<double>(batch));
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t j = 0; j < batch; ++j) masks[t][j] = t < lengths[j] ? 1.0 : 0.0;
    }

    BiLstmForwardCache local;
    BiLstmForwardCache* fc = cache != nullptr ? cache : &local;
    fc->lengths = lengths;
    fc->steps = steps;
    fc->batch = batch;

    const std::vector<Matrix> l1 =
        bilstm_layer_forward(seq, model.layer1_fwd, model.layer1_bwd, &fc->layer1, &masks);
    const std::vector<Matrix> l2 =
        bilstm_layer_forward(l1, model.layer2_fwd, model.layer2_bwd, &fc->layer2, &masks);

    // Readout: the concatenated layer-2 state at the last real position.
    Matrix features(2 * hidden, batch);
    for (std::size_t j = 0; j < batch; ++j) {
        const Matrix& src = l2[lengths[j] - 1];
        for (std::size_t i = 0; i < 2 * hidden; ++i) features(i, j) = src(i, j);
    }
    fc->features = features;

    Matrix logits = matmul(model.head_W, features);
    add_col_broadcast_inplace(logits, model.head_b);
    fc->probs_rows = softmax_rows(transpose(logits));
    return transpose(fc->probs_rows);
}

BiLstmGrads BiLstmGrads::zeros_like(const BiLstmClassifier& model) {
    BiLstmGrads g;
    g.layer1.fwd = LstmCellParams::zeros(model.layer1_fwd.input_dim(), model.hidden_dim());
    g.layer1.bwd = LstmCellParams::zeros(model.layer1_bwd.input_dim(), model.hidden_dim());
    g.layer2.fwd = LstmCellParams::zeros(model.layer2_fwd.input_dim(), model.hidden_dim());
    g.layer2.bwd = LstmCellParams::zeros(model.layer2_bwd.input_dim(), model.hidden_dim());
    g.head_W = Matrix(2, 2 * model.hidden_dim());
    g.head_b = Matrix(2, 1);
    return g;
}

ConstParamRefs BiLstmGrads::params() const {
    ConstParamRefs refs;
    auto* self = const_cast<BiLstmGrads*>(this);
    ParamRefs mut;
    self->layer1.fwd.append_params("layer1_fwd", &mut);
    self->layer1.bwd.append_params("layer1_bwd", &mut);
    self->layer2.fwd.append_params("layer2_fwd", &mut);
    self->layer2.bwd.append_params("layer2_bwd", &mut);
    mut.emplace_back("head_W", &self->head_W);
    mut.emplace_back("head_b", &self->head_b);
    refs.reserve(mut.size());
    for (auto& [name, mat] : mut) refs.emplace_back(name, mat);
    return refs;
}

std::vector<Matrix> bilstm_classify_backward(const Matrix& grad_probs,
                                             const BiLstmForwardCache& cache,
                                             const BiLstmClassifier& model,
                                             BiLstmGrads* grads) {
    if (cache.steps == 0 || cache.probs_rows.rows() != cache.batch) {
        throw ContractError("bilstm_classify_backward: cache not produced by a forward call");
    }
    if (grad_probs.rows() != 2 || grad_probs.cols() != cache.batch) {
        throw ShapeError("bilstm_classify_backward: upstream " + grad_probs.shape_str() +
                         " for batch " + std::to_string(cache.batch));
    }
    const std::size_t hidden = model.hidden_dim();

    const Matrix glogits =
        transpose(softmax_rows_backward(cache.probs_rows, transpose(grad_probs)));
    add_inplace(grads->head_W, matmul_nt(glogits, cache.features));
    add_inplace(grads->head_b, row_sum(glogits));
    const Matrix dfeatures = matmul_tn(model.head_W, glogits);

    // Scatter the feature gradient back to each column's readout position.
    std::vector<Matrix> dl2(cache.steps, Matrix(2 * hidden, cache.batch));
    for (std::size_t j = 0; j < cache.batch; ++j) {
        Matrix& dst = dl2[cache.lengths[j] - 1];
        for (std::size_t i = 0; i < 2 * hidden; ++i) dst(i, j) = dfeatures(i, j);
    }

    const std::vector<Matrix> dl1 = bilstm_layer_backward(
        dl2, cache.layer2, model.layer2_fwd, model.layer2_bwd, &grads->layer2);
    return bilstm_layer_backward(dl1, cache.layer1, model.layer1_fwd, model.layer1_bwd,
                                 &grads->layer1);
}

}  // namespace sentistack
