#include "hsd/model.hpp"

#include <cmath>

#include "hsd/errors.hpp"
#include "hsd/rng.hpp"

namespace hsd {

namespace {
constexpr double kLayerNormEps = 1e-5;
}

std::string encoder_kind_name(EncoderKind kind) {
    return kind == EncoderKind::Bag ? "bag" : "attention";
}

EncoderKind parse_encoder_kind(const std::string& name) {
    if (name == "bag") return EncoderKind::Bag;
    if (name == "attention") return EncoderKind::Attention;
    throw ConfigError("unknown encoder \"" + name + "\" (expected bag or attention)");
}

void ModelConfig::validate() const {
    if (vocab_size < 2) throw ConfigError("vocab_size must be >= 2");
    if (embed_dim < 1) throw ConfigError("embed_dim must be >= 1");
    if (num_classes < 2) throw ConfigError("num_classes must be >= 2");
    if (encoder == EncoderKind::Attention) {
        if (num_heads < 1) throw ConfigError("num_heads must be >= 1");
        if (embed_dim % num_heads != 0) {
            throw ConfigError("embed_dim must be divisible by num_heads");
        }
        if (ffn_dim < 1) throw ConfigError("ffn_dim must be >= 1");
    }
}

GradientSet zeros_like(const ModelParams& params) {
    GradientSet g;
    g.config = params.config;
    g.embedding = Eigen::MatrixXd::Zero(params.embedding.rows(), params.embedding.cols());
    g.attn.wq = Eigen::MatrixXd::Zero(params.attn.wq.rows(), params.attn.wq.cols());
    g.attn.wk = Eigen::MatrixXd::Zero(params.attn.wk.rows(), params.attn.wk.cols());
    g.attn.wv = Eigen::MatrixXd::Zero(params.attn.wv.rows(), params.attn.wv.cols());
    g.attn.wo = Eigen::MatrixXd::Zero(params.attn.wo.rows(), params.attn.wo.cols());
    g.attn.ffn_w1 = Eigen::MatrixXd::Zero(params.attn.ffn_w1.rows(), params.attn.ffn_w1.cols());
    g.attn.ffn_b1 = Eigen::VectorXd::Zero(params.attn.ffn_b1.size());
    g.attn.ffn_w2 = Eigen::MatrixXd::Zero(params.attn.ffn_w2.rows(), params.attn.ffn_w2.cols());
    g.attn.ffn_b2 = Eigen::VectorXd::Zero(params.attn.ffn_b2.size());
    g.head_w = Eigen::MatrixXd::Zero(params.head_w.rows(), params.head_w.cols());
    g.head_b = Eigen::VectorXd::Zero(params.head_b.size());
    return g;
}

std::vector<TensorView> tensor_views(ModelParams& params) {
    std::vector<TensorView> views;
    const auto add_matrix = [&](const std::string& name, Eigen::MatrixXd& m, bool decay,
                                bool pad_row_zero = false) {
        if (m.size() == 0) return;
        views.push_back(TensorView{name, m.data(),
                                   {static_cast<int>(m.rows()), static_cast<int>(m.cols())}, decay,
                                   pad_row_zero});
    };
    const auto add_vector = [&](const std::string& name, Eigen::VectorXd& v) {
        if (v.size() == 0) return;
        views.push_back(TensorView{name, v.data(), {static_cast<int>(v.size())}, false, false});
    };
    add_matrix("embedding", params.embedding, true, true);
    add_matrix("attn.wq", params.attn.wq, true);
    add_matrix("attn.wk", params.attn.wk, true);
    add_matrix("attn.wv", params.attn.wv, true);
    add_matrix("attn.wo", params.attn.wo, true);
    add_matrix("attn.ffn_w1", params.attn.ffn_w1, true);
    add_vector("attn.ffn_b1", params.attn.ffn_b1);
    add_matrix("attn.ffn_w2", params.attn.ffn_w2, true);
    add_vector("attn.ffn_b2", params.attn.ffn_b2);
    add_matrix("head_w", params.head_w, true);
    add_vector("head_b", params.head_b);
    return views;
}

namespace {

Eigen::MatrixXd glorot_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.next_double(-s, s);
    }
    return m;
}

// Layer norm without learned affine. Writes normalized rows and the
// inverse std per row; pad rows (all zero) normalize back to zero.
void layer_norm_rows(const Eigen::MatrixXd& input, Eigen::MatrixXd& out,
                     Eigen::VectorXd& inv_std) {
    const Eigen::Index rows = input.rows();
    const auto d = static_cast<double>(input.cols());
    out.resize(rows, input.cols());
    inv_std.resize(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double mu = input.row(r).mean();
        const double var = (input.row(r).array() - mu).square().sum() / d;
        const double is = 1.0 / std::sqrt(var + kLayerNormEps);
        inv_std(r) = is;
        out.row(r) = (input.row(r).array() - mu) * is;
    }
}

// d/d input of layer_norm_rows given upstream d/d output.
void layer_norm_backward_rows(const Eigen::MatrixXd& normed, const Eigen::VectorXd& inv_std,
                              const Eigen::MatrixXd& dout, Eigen::MatrixXd& dinput) {
    const Eigen::Index rows = normed.rows();
    const auto d = static_cast<double>(normed.cols());
    dinput.resize(rows, normed.cols());
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double mean_dout = dout.row(r).mean();
        const double mean_dout_y = (dout.row(r).array() * normed.row(r).array()).sum() / d;
        dinput.row(r) =
            inv_std(r) * (dout.row(r).array() - mean_dout - normed.row(r).array() * mean_dout_y);
    }
}

}  // namespace

ModelParams init_params(const ModelConfig& config) {
    config.validate();
    Rng rng(derive_seed(config.init_seed, 0x696e6974ULL));  // "init"

    ModelParams p;
    p.config = config;
    const Eigen::Index V = config.vocab_size;
    const Eigen::Index D = config.embed_dim;
    const Eigen::Index K = config.num_classes;

    p.embedding = glorot_matrix(V, D, rng);
    p.embedding.row(Vocabulary::kPadId).setZero();

    if (config.encoder == EncoderKind::Attention) {
        const Eigen::Index F = config.ffn_dim;
        p.attn.wq = glorot_matrix(D, D, rng);
        p.attn.wk = glorot_matrix(D, D, rng);
        p.attn.wv = glorot_matrix(D, D, rng);
        p.attn.wo = glorot_matrix(D, D, rng);
        p.attn.ffn_w1 = glorot_matrix(D, F, rng);
        p.attn.ffn_b1 = Eigen::VectorXd::Zero(F);
        p.attn.ffn_w2 = glorot_matrix(F, D, rng);
        p.attn.ffn_b2 = Eigen::VectorXd::Zero(D);
    }

    p.head_w = glorot_matrix(D, K, rng);
    p.head_b = Eigen::VectorXd::Zero(K);
    return p;
}

ForwardCache forward(const ModelParams& params, const EncodedBatch& batch) {
    const ModelConfig& cfg = params.config;
    const Eigen::Index B = batch.batch_size();
    const Eigen::Index L = batch.max_len();
    const Eigen::Index D = cfg.embed_dim;

    if (batch.ids.maxCoeff() >= cfg.vocab_size || batch.ids.minCoeff() < 0) {
        throw DataError("token id out of range for vocabulary size " +
                        std::to_string(cfg.vocab_size));
    }

    ForwardCache cache;
    cache.batch = batch;

    cache.embedded.resize(B * L, D);
    for (Eigen::Index b = 0; b < B; ++b) {
        for (Eigen::Index t = 0; t < L; ++t) {
            cache.embedded.row(b * L + t) = params.embedding.row(batch.ids(b, t));
        }
    }

    if (cfg.encoder == EncoderKind::Attention) {
        const Eigen::Index H = cfg.num_heads;
        const Eigen::Index dh = cfg.head_dim();
        const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

        layer_norm_rows(cache.embedded, cache.ln1_out, cache.ln1_inv_std);
        cache.q = cache.ln1_out * params.attn.wq;
        cache.k = cache.ln1_out * params.attn.wk;
        cache.v = cache.ln1_out * params.attn.wv;

        cache.attn_probs.assign(static_cast<std::size_t>(B * H), Eigen::MatrixXd());
        cache.attn_concat.resize(B * L, D);
        for (Eigen::Index b = 0; b < B; ++b) {
            const Eigen::Index n = batch.lengths(b);
            for (Eigen::Index h = 0; h < H; ++h) {
                const auto qh = cache.q.block(b * L, h * dh, L, dh);
                const auto kh = cache.k.block(b * L, h * dh, L, dh);
                const auto vh = cache.v.block(b * L, h * dh, L, dh);
                Eigen::MatrixXd scores = qh * kh.transpose() * scale;

                Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(L, L);
                for (Eigen::Index t = 0; t < L; ++t) {
                    if (n >= 1) {
                        const double m = scores.row(t).head(n).maxCoeff();
                        Eigen::ArrayXd e = (scores.row(t).head(n).array() - m).exp();
                        probs.row(t).head(n) = (e / e.sum()).matrix();
                    } else {
                        probs.row(t).setConstant(1.0 / static_cast<double>(L));
                    }
                }
                cache.attn_probs[static_cast<std::size_t>(b * H + h)] = probs;
                cache.attn_concat.block(b * L, h * dh, L, dh) = probs * vh;
            }
        }

        cache.h1 = cache.embedded + cache.attn_concat * params.attn.wo;
        layer_norm_rows(cache.h1, cache.ln2_out, cache.ln2_inv_std);
        cache.ffn_pre = cache.ln2_out * params.attn.ffn_w1;
        cache.ffn_pre.rowwise() += params.attn.ffn_b1.transpose();
        cache.ffn_act = cache.ffn_pre.cwiseMax(0.0);
        cache.encoded = cache.h1 + cache.ffn_act * params.attn.ffn_w2;
        cache.encoded.rowwise() += params.attn.ffn_b2.transpose();
    } else {
        cache.encoded = cache.embedded;
    }

    cache.pooled.resize(B, D);
    for (Eigen::Index b = 0; b < B; ++b) {
        Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(D);
        for (Eigen::Index t = 0; t < batch.lengths(b); ++t) sum += cache.encoded.row(b * L + t);
        cache.pooled.row(b) = sum / static_cast<double>(batch.lengths(b));
    }

    cache.logits = cache.pooled * params.head_w;
    cache.logits.rowwise() += params.head_b.transpose();
    return cache;
}

GradientSet backward(const ModelParams& params, const ForwardCache& cache,
                     const Eigen::Ref<const Eigen::MatrixXd>& dlogits) {
    const ModelConfig& cfg = params.config;
    const Eigen::Index B = cache.batch.batch_size();
    const Eigen::Index L = cache.batch.max_len();
    const Eigen::Index D = cfg.embed_dim;

    if (dlogits.rows() != B || dlogits.cols() != cfg.num_classes) {
        throw DataError("backward: dlogits shape mismatch");
    }

    GradientSet grads = zeros_like(params);

    grads.head_w = cache.pooled.transpose() * dlogits;
    grads.head_b = dlogits.colwise().sum().transpose();

    Eigen::MatrixXd dpooled = dlogits * params.head_w.transpose();  // [B x D]

    Eigen::MatrixXd dencoded = Eigen::MatrixXd::Zero(B * L, D);
    for (Eigen::Index b = 0; b < B; ++b) {
        const double inv_n = 1.0 / static_cast<double>(cache.batch.lengths(b));
        for (Eigen::Index t = 0; t < cache.batch.lengths(b); ++t) {
            dencoded.row(b * L + t) = dpooled.row(b) * inv_n;
        }
    }

    Eigen::MatrixXd dembedded;
    if (cfg.encoder == EncoderKind::Attention) {
        const Eigen::Index H = cfg.num_heads;
        const Eigen::Index dh = cfg.head_dim();
        const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

        // FFN with residual: encoded = h1 + relu(ln2(h1) W1 + b1) W2 + b2.
        const Eigen::MatrixXd& dffn_out = dencoded;
        grads.attn.ffn_b2 = dffn_out.colwise().sum().transpose();
        grads.attn.ffn_w2 = cache.ffn_act.transpose() * dffn_out;
        Eigen::MatrixXd dact = dffn_out * params.attn.ffn_w2.transpose();
        Eigen::MatrixXd dpre =
            (cache.ffn_pre.array() > 0.0).select(dact, Eigen::MatrixXd::Zero(B * L, cfg.ffn_dim));
        grads.attn.ffn_b1 = dpre.colwise().sum().transpose();
        grads.attn.ffn_w1 = cache.ln2_out.transpose() * dpre;
        Eigen::MatrixXd dln2_out = dpre * params.attn.ffn_w1.transpose();

        Eigen::MatrixXd dh1;
        layer_norm_backward_rows(cache.ln2_out, cache.ln2_inv_std, dln2_out, dh1);
        dh1 += dencoded;  // residual path

        // Attention with residual: h1 = embedded + concat(heads) Wo.
        grads.attn.wo = cache.attn_concat.transpose() * dh1;
        Eigen::MatrixXd dconcat = dh1 * params.attn.wo.transpose();

        Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(B * L, D);
        Eigen::MatrixXd dk = Eigen::MatrixXd::Zero(B * L, D);
        Eigen::MatrixXd dv = Eigen::MatrixXd::Zero(B * L, D);
        for (Eigen::Index b = 0; b < B; ++b) {
            const Eigen::Index n = cache.batch.lengths(b);
            for (Eigen::Index h = 0; h < H; ++h) {
                const Eigen::MatrixXd& probs =
                    cache.attn_probs[static_cast<std::size_t>(b * H + h)];
                const auto qh = cache.q.block(b * L, h * dh, L, dh);
                const auto kh = cache.k.block(b * L, h * dh, L, dh);
                const auto vh = cache.v.block(b * L, h * dh, L, dh);
                const auto dout_h = dconcat.block(b * L, h * dh, L, dh);

                Eigen::MatrixXd dprobs = dout_h * vh.transpose();  // [L x L]
                dv.block(b * L, h * dh, L, dh) += probs.transpose() * dout_h;

                // Softmax backward per query row over the valid keys.
                Eigen::MatrixXd dscores = Eigen::MatrixXd::Zero(L, L);
                for (Eigen::Index t = 0; t < L; ++t) {
                    const auto p = probs.row(t).head(n).array();
                    const auto dp = dprobs.row(t).head(n).array();
                    const double dot = (p * dp).sum();
                    dscores.row(t).head(n) = (p * (dp - dot)).matrix();
                }

                dq.block(b * L, h * dh, L, dh) += dscores * kh * scale;
                dk.block(b * L, h * dh, L, dh) += dscores.transpose() * qh * scale;
            }
        }

        grads.attn.wq = cache.ln1_out.transpose() * dq;
        grads.attn.wk = cache.ln1_out.transpose() * dk;
        grads.attn.wv = cache.ln1_out.transpose() * dv;
        Eigen::MatrixXd dln1_out = dq * params.attn.wq.transpose() +
                                   dk * params.attn.wk.transpose() +
                                   dv * params.attn.wv.transpose();

        layer_norm_backward_rows(cache.ln1_out, cache.ln1_inv_std, dln1_out, dembedded);
        dembedded += dh1;  // residual path
    } else {
        dembedded = dencoded;
    }

    for (Eigen::Index b = 0; b < B; ++b) {
        for (Eigen::Index t = 0; t < L; ++t) {
            grads.embedding.row(cache.batch.ids(b, t)) += dembedded.row(b * L + t);
        }
    }
    grads.embedding.row(Vocabulary::kPadId).setZero();
    return grads;
}

Eigen::VectorXi predict(const Eigen::Ref<const Eigen::MatrixXd>& logits) {
    if (!logits.allFinite()) throw NumericError("non-finite logits in predict");
    Eigen::VectorXi out(logits.rows());
    for (Eigen::Index b = 0; b < logits.rows(); ++b) {
        int best = 0;
        for (Eigen::Index k = 1; k < logits.cols(); ++k) {
            if (logits(b, k) > logits(b, best)) best = static_cast<int>(k);
        }
        out(b) = best;
    }
    return out;
}

}  // namespace hsd
