#pragma once

#include <optional>
#include <vector>

#include "gmatch/common.hpp"

namespace gmatch {

/// Probability a random positive outscores a random negative, ties counted
/// one half (Mann-Whitney). Labels are 0/1; requires both classes present.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct MultiTaskAuc {
    std::vector<std::optional<double>> per_task;  // empty = undefined task
    double mean_defined = 0.0;
    std::size_t defined_count = 0;
};

/// Per-task AUC over observed entries (mask true); tasks with a single
/// observed class are reported undefined and skipped from the mean.
/// scores/labels are num_graphs x num_tasks row-major.
MultiTaskAuc multi_task_auc(const std::vector<double>& scores,
                            const std::vector<double>& labels,
                            const std::vector<bool>& mask,
                            std::size_t num_graphs, std::size_t num_tasks);

struct TransferReport {
    struct TaskRow {
        int task = 0;
        double pretrained = 0.0;
        double baseline = 0.0;
        double delta = 0.0;  // pretrained - baseline
    };
    std::vector<TaskRow> rows;
    int positive_count = 0;  // delta >= 0 (ties count as non-negative)
    int negative_count = 0;
    double worst_negative = 0.0;  // min(0, min delta)
    bool all_pretrained_above_half = false;
};

TransferReport transfer_report(const std::vector<double>& pretrained,
                               const std::vector<double>& baseline);

}  // namespace gmatch
