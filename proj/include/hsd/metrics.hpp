#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hsd {

struct ClassScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct Metrics {
    Eigen::MatrixXi confusion;  // rows = truth, cols = prediction
    std::vector<ClassScore> per_class;
    double macro_f1 = 0.0;

    int sample_count() const { return confusion.sum(); }
};

// Entry (i, j) counts samples with truth i and prediction j.
Eigen::MatrixXi confusion(const Eigen::Ref<const Eigen::VectorXi>& truth,
                          const Eigen::Ref<const Eigen::VectorXi>& pred, int num_classes);

// Per-class precision/recall/F1 with the 0/0 -> 0 convention, and their
// unweighted mean over all classes (zero-support classes included).
Metrics macro_f1(const Eigen::Ref<const Eigen::MatrixXi>& confusion);

Metrics evaluate_predictions(const Eigen::Ref<const Eigen::VectorXi>& truth,
                             const Eigen::Ref<const Eigen::VectorXi>& pred, int num_classes);

}  // namespace hsd
