#include "hsd/metrics.hpp"

#include <string>

#include "hsd/errors.hpp"

namespace hsd {

Eigen::MatrixXi confusion(const Eigen::Ref<const Eigen::VectorXi>& truth,
                          const Eigen::Ref<const Eigen::VectorXi>& pred, int num_classes) {
    if (truth.size() != pred.size()) {
        throw DataError("confusion: truth and prediction lengths differ");
    }
    if (truth.size() < 1) throw DataError("confusion: no samples");

    Eigen::MatrixXi matrix = Eigen::MatrixXi::Zero(num_classes, num_classes);
    for (Eigen::Index i = 0; i < truth.size(); ++i) {
        const int t = truth(i);
        const int p = pred(i);
        if (t < 0 || t >= num_classes || p < 0 || p >= num_classes) {
            throw DataError("confusion: class id out of range at sample " + std::to_string(i));
        }
        ++matrix(t, p);
    }
    return matrix;
}

Metrics macro_f1(const Eigen::Ref<const Eigen::MatrixXi>& confusion) {
    const Eigen::Index K = confusion.rows();
    if (K < 2 || confusion.cols() != K) {
        throw DataError("macro_f1: confusion matrix must be KxK with K >= 2");
    }
    if (confusion.sum() < 1) throw DataError("macro_f1: empty confusion matrix");

    Metrics out;
    out.confusion = confusion;
    out.per_class.resize(static_cast<std::size_t>(K));
    double f1_sum = 0.0;
    for (Eigen::Index c = 0; c < K; ++c) {
        const double tp = confusion(c, c);
        const double fp = confusion.col(c).sum() - tp;
        const double fn = confusion.row(c).sum() - tp;
        ClassScore& s = out.per_class[static_cast<std::size_t>(c)];
        s.precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
        s.recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
        s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                                            : 0.0;
        f1_sum += s.f1;
    }
    out.macro_f1 = f1_sum / static_cast<double>(K);
    return out;
}

Metrics evaluate_predictions(const Eigen::Ref<const Eigen::VectorXi>& truth,
                             const Eigen::Ref<const Eigen::VectorXi>& pred, int num_classes) {
    return macro_f1(confusion(truth, pred, num_classes));
}

}  // namespace hsd
