#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace hsd {

enum class WeightScheme { Uniform, InverseFrequencyNormalized };

std::string weight_scheme_name(WeightScheme scheme);
WeightScheme parse_weight_scheme(const std::string& name);

// Per-class positive loss weights. The inverse-frequency scheme uses
// w_c = N / (K * n_c), so the mean weight over training examples is 1 and
// rarer classes always get strictly larger weights.
struct ClassWeights {
    Eigen::VectorXd weights;
    WeightScheme scheme = WeightScheme::Uniform;

    int num_classes() const { return static_cast<int>(weights.size()); }
};

ClassWeights compute_class_weights(const std::vector<std::int64_t>& counts, WeightScheme scheme);

// Stable log(sum_j exp(z_j)) via max subtraction.
double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& logits);

Eigen::VectorXd softmax(const Eigen::Ref<const Eigen::VectorXd>& logits);

// Class-weighted cross entropy for one example:
//   weight[class] * (-logits[class] + log(sum_j exp(logits[j])))
double weighted_ce(const Eigen::Ref<const Eigen::VectorXd>& logits, int label,
                   const ClassWeights& weights);

// d loss / d logits = weight[class] * (softmax(logits) - onehot(class)).
Eigen::VectorXd weighted_ce_grad(const Eigen::Ref<const Eigen::VectorXd>& logits, int label,
                                 const ClassWeights& weights);

// Mean weighted cross entropy over a batch plus the matching gradient
// (per-example gradients divided by the batch size).
std::pair<double, Eigen::MatrixXd> batch_loss(const Eigen::Ref<const Eigen::MatrixXd>& logits,
                                              const Eigen::Ref<const Eigen::VectorXi>& labels,
                                              const ClassWeights& weights);

}  // namespace hsd
