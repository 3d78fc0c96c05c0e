#include "hsd/optim.hpp"

#include <cmath>

#include "hsd/errors.hpp"

namespace hsd {

void OptimHyper::validate() const {
    if (!(lr > 0.0)) throw ConfigError("lr must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1 must be in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("beta2 must be in [0, 1)");
    if (!(eps > 0.0)) throw ConfigError("eps must be > 0");
    if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
}

OptimizerState OptimizerState::for_params(const ModelParams& params) {
    OptimizerState state;
    state.step = 0;
    state.m = zeros_like(params);
    state.v = zeros_like(params);
    return state;
}

void adamw_step(ModelParams& params, GradientSet& grads, OptimizerState& state,
                const OptimHyper& hyper) {
    hyper.validate();

    auto param_views = tensor_views(params);
    auto grad_views = tensor_views(grads);
    auto m_views = tensor_views(state.m);
    auto v_views = tensor_views(state.v);
    if (param_views.size() != grad_views.size() || param_views.size() != m_views.size() ||
        param_views.size() != v_views.size()) {
        throw DataError("adamw_step: tensor set shapes do not match");
    }

    // All gradients must be finite before any parameter is touched.
    for (std::size_t i = 0; i < param_views.size(); ++i) {
        if (grad_views[i].shape != param_views[i].shape) {
            throw DataError("adamw_step: gradient shape mismatch for " + param_views[i].name);
        }
        std::size_t count = 1;
        for (const int d : grad_views[i].shape) count *= static_cast<std::size_t>(d);
        for (std::size_t j = 0; j < count; ++j) {
            if (!std::isfinite(grad_views[i].data[j])) {
                throw NumericError("non-finite gradient in " + param_views[i].name);
            }
        }
    }

    state.step += 1;
    const auto t = static_cast<double>(state.step);
    const double bias1 = 1.0 - std::pow(hyper.beta1, t);
    const double bias2 = 1.0 - std::pow(hyper.beta2, t);

    for (std::size_t i = 0; i < param_views.size(); ++i) {
        const TensorView& pv = param_views[i];
        double* theta = pv.data;
        const double* g = grad_views[i].data;
        double* m = m_views[i].data;
        double* v = v_views[i].data;

        std::size_t count = 1;
        for (const int d : pv.shape) count *= static_cast<std::size_t>(d);

        // Column-major storage: element j of the embedding lies in row
        // j % rows, which decides the PAD-row decay exemption.
        const int rows = pv.shape.front();
        for (std::size_t j = 0; j < count; ++j) {
            m[j] = hyper.beta1 * m[j] + (1.0 - hyper.beta1) * g[j];
            v[j] = hyper.beta2 * v[j] + (1.0 - hyper.beta2) * g[j] * g[j];
            const double m_hat = m[j] / bias1;
            const double v_hat = v[j] / bias2;
            double update = m_hat / (std::sqrt(v_hat) + hyper.eps);
            const bool decays =
                pv.decay && !(pv.pad_row_zero && static_cast<int>(j % static_cast<std::size_t>(rows)) == 0);
            if (decays) update += hyper.weight_decay * theta[j];
            theta[j] -= hyper.lr * update;
        }
    }
}

}  // namespace hsd
