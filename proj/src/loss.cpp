#include "hsd/loss.hpp"

#include <cmath>
#include <string>

#include "hsd/errors.hpp"

namespace hsd {

std::string weight_scheme_name(WeightScheme scheme) {
    return scheme == WeightScheme::Uniform ? "uniform" : "inverse_frequency_normalized";
}

WeightScheme parse_weight_scheme(const std::string& name) {
    if (name == "uniform") return WeightScheme::Uniform;
    if (name == "inverse_frequency_normalized") return WeightScheme::InverseFrequencyNormalized;
    throw ConfigError("unknown weight_scheme \"" + name + "\"");
}

ClassWeights compute_class_weights(const std::vector<std::int64_t>& counts, WeightScheme scheme) {
    const auto K = static_cast<Eigen::Index>(counts.size());
    ClassWeights out;
    out.scheme = scheme;
    out.weights = Eigen::VectorXd::Ones(K);
    if (scheme == WeightScheme::Uniform) return out;

    std::int64_t total = 0;
    for (const auto n : counts) total += n;
    for (Eigen::Index c = 0; c < K; ++c) {
        const auto n = counts[static_cast<std::size_t>(c)];
        if (n <= 0) {
            throw DataError("class " + std::to_string(c) +
                            " has no training examples; inverse-frequency weights undefined");
        }
        out.weights(c) =
            static_cast<double>(total) / (static_cast<double>(K) * static_cast<double>(n));
    }
    return out;
}

namespace {

void check_finite(const Eigen::Ref<const Eigen::VectorXd>& logits) {
    if (!logits.allFinite()) throw NumericError("non-finite logits");
}

void check_label(int label, Eigen::Index k) {
    if (label < 0 || label >= k) {
        throw DataError("label " + std::to_string(label) + " out of range for " +
                        std::to_string(k) + " classes");
    }
}

}  // namespace

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& logits) {
    const double m = logits.maxCoeff();
    return m + std::log((logits.array() - m).exp().sum());
}

Eigen::VectorXd softmax(const Eigen::Ref<const Eigen::VectorXd>& logits) {
    const double m = logits.maxCoeff();
    Eigen::VectorXd e = (logits.array() - m).exp();
    return e / e.sum();
}

double weighted_ce(const Eigen::Ref<const Eigen::VectorXd>& logits, int label,
                   const ClassWeights& weights) {
    check_finite(logits);
    check_label(label, logits.size());
    if (weights.weights.size() != logits.size()) {
        throw DataError("weight vector size does not match logits");
    }
    return weights.weights(label) * (-logits(label) + log_sum_exp(logits));
}

Eigen::VectorXd weighted_ce_grad(const Eigen::Ref<const Eigen::VectorXd>& logits, int label,
                                 const ClassWeights& weights) {
    check_finite(logits);
    check_label(label, logits.size());
    Eigen::VectorXd grad = softmax(logits);
    grad(label) -= 1.0;
    grad *= weights.weights(label);
    return grad;
}

std::pair<double, Eigen::MatrixXd> batch_loss(const Eigen::Ref<const Eigen::MatrixXd>& logits,
                                              const Eigen::Ref<const Eigen::VectorXi>& labels,
                                              const ClassWeights& weights) {
    const Eigen::Index B = logits.rows();
    if (B < 1) throw DataError("batch_loss: empty batch");
    if (labels.size() != B) throw DataError("batch_loss: labels/logits size mismatch");

    double total = 0.0;
    Eigen::MatrixXd dlogits(B, logits.cols());
    for (Eigen::Index b = 0; b < B; ++b) {
        total += weighted_ce(logits.row(b).transpose(), labels(b), weights);
        dlogits.row(b) = weighted_ce_grad(logits.row(b).transpose(), labels(b), weights).transpose();
    }
    const double inv_b = 1.0 / static_cast<double>(B);
    dlogits *= inv_b;
    return {total * inv_b, dlogits};
}

}  // namespace hsd
