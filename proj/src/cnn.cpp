#include "sentistack/cnn.hpp"

#include <cmath>
#include <cstring>

#include "sentistack/errors.hpp"

namespace sentistack {

CnnParams CnnParams::zeros(std::size_t embed_dim, std::size_t maps_per_bank,
                           std::size_t hidden_fc) {
    CnnParams p;
    for (std::size_t width = 1; width <= 4; ++width) {
        ConvBank bank;
        bank.width = width;
        bank.W = Matrix(maps_per_bank, width * embed_dim);
        bank.b = Matrix(maps_per_bank, 1);
        p.banks.push_back(std::move(bank));
    }
    p.fc1_W = Matrix(hidden_fc, 4 * maps_per_bank);
    p.fc1_b = Matrix(hidden_fc, 1);
    p.fc2_W = Matrix(2, hidden_fc);
    p.fc2_b = Matrix(2, 1);
    return p;
}

CnnParams CnnParams::init(std::size_t embed_dim, std::size_t maps_per_bank,
                          std::size_t hidden_fc, Rng& rng) {
    CnnParams p = zeros(embed_dim, maps_per_bank, hidden_fc);
    auto fill_uniform = [&rng](Matrix& m, std::size_t fan_in) {
        const double k = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t idx = 0; idx < m.size(); ++idx) m.data()[idx] = rng.uniform(-k, k);
    };
    for (auto& bank : p.banks) fill_uniform(bank.W, bank.width * embed_dim);
    fill_uniform(p.fc1_W, 4 * maps_per_bank);
    fill_uniform(p.fc2_W, hidden_fc);
    return p;
}

void CnnParams::validate() const {
    if (banks.size() != 4) {
        throw ShapeError("cnn: expected 4 filter banks, got " + std::to_string(banks.size()));
    }
    const std::size_t maps = banks[0].W.rows();
    const std::size_t d = embed_dim();
    for (std::size_t k = 0; k < 4; ++k) {
        const ConvBank& bank = banks[k];
        if (bank.width != k + 1) {
            throw ShapeError("cnn: bank " + std::to_string(k) + " has width " +
                             std::to_string(bank.width));
        }
        if (bank.W.rows() != maps || bank.W.cols() != bank.width * d ||
            bank.b.rows() != maps || bank.b.cols() != 1) {
            throw ShapeError("cnn: bank " + std::to_string(k) + " shapes " +
                             bank.W.shape_str() + "/" + bank.b.shape_str());
        }
    }
    if (fc1_W.cols() != 4 * maps || fc1_b.rows() != fc1_W.rows() || fc1_b.cols() != 1) {
        throw ShapeError("cnn: fc1 " + fc1_W.shape_str() + " for pooled width " +
                         std::to_string(4 * maps));
    }
    if (fc2_W.rows() != 2 || fc2_W.cols() != fc1_W.rows() || fc2_b.rows() != 2 ||
        fc2_b.cols() != 1) {
        throw ShapeError("cnn: fc2 " + fc2_W.shape_str() + " for fc1 rows " +
                         std::to_string(fc1_W.rows()));
    }
}

ParamRefs CnnParams::params() {
    ParamRefs refs;
    for (auto& bank : banks) {
        const std::string prefix = "conv" + std::to_string(bank.width);
        refs.emplace_back(prefix + ".W", &bank.W);
        refs.emplace_back(prefix + ".b", &bank.b);
    }
    refs.emplace_back("fc1_W", &fc1_W);
    refs.emplace_back("fc1_b", &fc1_b);
    refs.emplace_back("fc2_W", &fc2_W);
    refs.emplace_back("fc2_b", &fc2_b);
    return refs;
}

ConstParamRefs CnnParams::params() const {
    ConstParamRefs refs;
    auto mut = const_cast<CnnParams*>(this)->params();
    refs.reserve(mut.size());
    for (auto& [name, mat] : mut) refs.emplace_back(name, mat);
    return refs;
}

namespace {

// im2col: column j is the flattened window of rows j..j+width-1. Row-major
// storage makes each window a contiguous span.
Matrix window_matrix(const Matrix& seq_embed, std::size_t width) {
    const std::size_t T = seq_embed.rows(), d = seq_embed.cols();
    const std::size_t L = T - width + 1;
    Matrix X(width * d, L);
    for (std::size_t j = 0; j < L; ++j) {
        const double* src = seq_embed.row_ptr(j);
        for (std::size_t r = 0; r < width * d; ++r) X(r, j) = src[r];
    }
    return X;
}

}  // namespace

Matrix conv_text_forward(const Matrix& seq_embed, const ConvBank& bank, Matrix* pre_relu) {
    if (seq_embed.rows() < bank.width) {
        throw ShapeError("conv_text_forward: sequence length " +
                         std::to_string(seq_embed.rows()) + " below filter width " +
                         std::to_string(bank.width));
    }
    if (bank.W.cols() != bank.width * seq_embed.cols()) {
        throw ShapeError("conv_text_forward: filters " + bank.W.shape_str() +
                         " do not match window " + std::to_string(bank.width) + "x" +
                         std::to_string(seq_embed.cols()));
    }
    Matrix pre = matmul(bank.W, window_matrix(seq_embed, bank.width));
    add_col_broadcast_inplace(pre, bank.b);
    if (pre_relu != nullptr) *pre_relu = pre;
    return relu(pre);
}

MaxPoolResult max_over_time(const Matrix& feat) {
    if (feat.cols() == 0 || feat.rows() == 0) {
        throw ContractError("max_over_time: empty feature map " + feat.shape_str());
    }
    MaxPoolResult result;
    result.values = Matrix(feat.rows(), 1);
    result.argmax.resize(feat.rows());
    for (std::size_t i = 0; i < feat.rows(); ++i) {
        const double* row = feat.row_ptr(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < feat.cols(); ++j) {
            if (row[j] > row[best]) best = j;  // strict: ties keep lowest index
        }
        result.values(i, 0) = row[best];
        result.argmax[i] = best;
    }
    return result;
}

Matrix cnn_classify_forward(const Matrix& seq_embed, const CnnParams& p,
                            CnnForwardCache* cache) {
    p.validate();
    if (seq_embed.rows() < 4) {
        throw ContractError("cnn_classify_forward: sequence length " +
                            std::to_string(seq_embed.rows()) +
                            " below the maximum filter width 4");
    }
    CnnForwardCache local;
    CnnForwardCache* fc = cache != nullptr ? cache : &local;
    fc->seq_embed = seq_embed;
    fc->window_mats.clear();
    fc->conv_pre.clear();
    fc->pools.clear();

    const std::size_t maps = p.maps_per_bank();
    Matrix pooled(4 * maps, 1);
    for (std::size_t k = 0; k < 4; ++k) {
        Matrix X = window_matrix(seq_embed, p.banks[k].width);
        Matrix pre = matmul(p.banks[k].W, X);
        add_col_broadcast_inplace(pre, p.banks[k].b);
        Matrix act = relu(pre);
        MaxPoolResult pool = max_over_time(act);
        for (std::size_t i = 0; i < maps; ++i) pooled(k * maps + i, 0) = pool.values(i, 0);
        fc->window_mats.push_back(std::move(X));
        fc->conv_pre.push_back(std::move(pre));
        fc->pools.push_back(std::move(pool));
    }
    fc->pooled = pooled;

    fc->fc1_pre = matmul(p.fc1_W, pooled);
    add_inplace(fc->fc1_pre, p.fc1_b);
    fc->fc1_act = relu(fc->fc1_pre);

    Matrix logits = matmul(p.fc2_W, fc->fc1_act);
    add_inplace(logits, p.fc2_b);
    fc->probs_rows = softmax_rows(transpose(logits));
    return transpose(fc->probs_rows);
}

Matrix cnn_classify_backward(const Matrix& grad_probs, const CnnForwardCache& cache,
                             const CnnParams& p, CnnParams* grads) {
    if (cache.conv_pre.size() != 4 || cache.probs_rows.rows() != 1) {
        throw ContractError("cnn_classify_backward: cache not produced by a forward call");
    }
    if (grad_probs.rows() != 2 || grad_probs.cols() != 1) {
        throw ShapeError("cnn_classify_backward: upstream " + grad_probs.shape_str());
    }
    const std::size_t maps = p.maps_per_bank();
    const std::size_t d = cache.seq_embed.cols();

    const Matrix glogits =
        transpose(softmax_rows_backward(cache.probs_rows, transpose(grad_probs)));
    add_inplace(grads->fc2_W, matmul_nt(glogits, cache.fc1_act));
    add_inplace(grads->fc2_b, glogits);

    Matrix dfc1 = matmul_tn(p.fc2_W, glogits);
    for (std::size_t idx = 0; idx < dfc1.size(); ++idx) {
        if (cache.fc1_pre.data()[idx] <= 0.0) dfc1.data()[idx] = 0.0;
    }
    add_inplace(grads->fc1_W, matmul_nt(dfc1, cache.pooled));
    add_inplace(grads->fc1_b, dfc1);

    const Matrix dpooled = matmul_tn(p.fc1_W, dfc1);
    Matrix dseq(cache.seq_embed.rows(), d);
    for (std::size_t k = 0; k < 4; ++k) {
        const Matrix& pre = cache.conv_pre[k];
        Matrix dact(pre.rows(), pre.cols());
        for (std::size_t i = 0; i < maps; ++i) {
            dact(i, cache.pools[k].argmax[i]) = dpooled(k * maps + i, 0);
        }
        // relu mask on the pre-activation
        for (std::size_t idx = 0; idx < dact.size(); ++idx) {
            if (pre.data()[idx] <= 0.0) dact.data()[idx] = 0.0;
        }
        add_inplace(grads->banks[k].W, matmul_nt(dact, cache.window_mats[k]));
        add_inplace(grads->banks[k].b, row_sum(dact));
        const Matrix dX = matmul_tn(p.banks[k].W, dact);
        // Scatter window columns back onto token rows.
        const std::size_t width = p.banks[k].width;
        for (std::size_t j = 0; j < dX.cols(); ++j) {
            double* dst = dseq.row_ptr(j);
            for (std::size_t r = 0; r < width * d; ++r) dst[r] += dX(r, j);
        }
    }
    return dseq;
}

}  // namespace sentistack
