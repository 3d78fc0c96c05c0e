#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hsd/textenc.hpp"

namespace hsd {

enum class EncoderKind { Bag, Attention };

std::string encoder_kind_name(EncoderKind kind);
EncoderKind parse_encoder_kind(const std::string& name);

struct ModelConfig {
    int vocab_size = 0;
    int embed_dim = 32;
    int num_classes = 2;
    EncoderKind encoder = EncoderKind::Bag;
    int num_heads = 2;   // attention only
    int ffn_dim = 64;    // attention only
    std::uint64_t init_seed = 0;

    void validate() const;
    int head_dim() const { return embed_dim / num_heads; }
};

// One self-attention + FFN block, pre-norm, projections without biases,
// parameter-free layer normalization.
struct AttentionParams {
    Eigen::MatrixXd wq, wk, wv, wo;  // [D x D]
    Eigen::MatrixXd ffn_w1;          // [D x F]
    Eigen::VectorXd ffn_b1;          // [F]
    Eigen::MatrixXd ffn_w2;          // [F x D]
    Eigen::VectorXd ffn_b2;          // [D]
};

struct ModelParams {
    ModelConfig config;
    Eigen::MatrixXd embedding;  // [V x D]; row 0 (PAD) pinned to zero
    AttentionParams attn;       // shapes 0x0 for the bag encoder
    Eigen::MatrixXd head_w;     // [D x K]
    Eigen::VectorXd head_b;     // [K]
};

// Gradients share the parameter layout tensor for tensor.
using GradientSet = ModelParams;

GradientSet zeros_like(const ModelParams& params);

// View over every trainable tensor, in a fixed order, for the optimizer
// and the checkpoint writer.
struct TensorView {
    std::string name;
    double* data;
    std::vector<int> shape;
    bool decay = true;           // weight-decay applies
    bool pad_row_zero = false;   // embedding only: row 0 stays zero
};

std::vector<TensorView> tensor_views(ModelParams& params);

struct ForwardCache {
    EncodedBatch batch;
    // All position-major matrices are [(B*L) x D] with row b*L + t.
    Eigen::MatrixXd embedded;
    Eigen::MatrixXd ln1_out;
    Eigen::VectorXd ln1_inv_std;
    Eigen::MatrixXd q, k, v;
    std::vector<Eigen::MatrixXd> attn_probs;  // B*H entries of [L x L]
    Eigen::MatrixXd attn_concat;              // heads concatenated, pre-Wo
    Eigen::MatrixXd h1;
    Eigen::MatrixXd ln2_out;
    Eigen::VectorXd ln2_inv_std;
    Eigen::MatrixXd ffn_pre;   // [(B*L) x F]
    Eigen::MatrixXd ffn_act;   // relu(ffn_pre)
    Eigen::MatrixXd encoded;   // final per-position states fed to pooling
    Eigen::MatrixXd pooled;    // [B x D]
    Eigen::MatrixXd logits;    // [B x K]
};

// Deterministic Glorot-uniform init: each weight tensor is drawn from
// uniform(-s, s) with s = sqrt(6 / (fan_in + fan_out)); biases start at
// zero and the PAD embedding row is cleared.
ModelParams init_params(const ModelConfig& config);

// Masked mean pooling over the encoder states followed by the linear
// head. Returns logits and the activations backward needs.
ForwardCache forward(const ModelParams& params, const EncodedBatch& batch);

// Exact gradients of sum(logits .* dlogits) w.r.t. every parameter.
GradientSet backward(const ModelParams& params, const ForwardCache& cache,
                     const Eigen::Ref<const Eigen::MatrixXd>& dlogits);

// Row-wise argmax with smallest-index tie-break.
Eigen::VectorXi predict(const Eigen::Ref<const Eigen::MatrixXd>& logits);

}  // namespace hsd
