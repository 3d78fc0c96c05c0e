#pragma once

#include <cstdint>

#include "hsd/model.hpp"

namespace hsd {

struct OptimHyper {
    double lr = 2e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;

    void validate() const;
};

struct OptimizerState {
    std::int64_t step = 0;
    GradientSet m;  // first moments, co-shaped with the parameters
    GradientSet v;  // second moments

    static OptimizerState for_params(const ModelParams& params);
};

// One AdamW update in place. Weight decay is decoupled from the gradient
// term and skipped for bias tensors and the PAD embedding row.
void adamw_step(ModelParams& params, GradientSet& grads, OptimizerState& state,
                const OptimHyper& hyper);

}  // namespace hsd
