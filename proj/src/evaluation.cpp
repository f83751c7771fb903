#include "gmatch/evaluation.hpp"

#include <algorithm>
#include <numeric>

namespace gmatch {

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw ShapeError("roc_auc: scores and labels differ in length");
    std::size_t pos = 0, neg = 0;
    for (int y : labels) {
        if (y == 1) ++pos;
        else if (y == 0) ++neg;
        else throw ValueError("roc_auc: labels must be 0 or 1");
    }
    if (pos == 0 || neg == 0) throw ValueError("undefined AUC");

    // Rank-based Mann-Whitney with average ranks on ties.
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] < scores[b];
    });
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]] == 1) pos_rank_sum += avg_rank;
        }
        i = j + 1;
    }
    const double p = static_cast<double>(pos);
    const double n = static_cast<double>(neg);
    return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

MultiTaskAuc multi_task_auc(const std::vector<double>& scores,
                            const std::vector<double>& labels,
                            const std::vector<bool>& mask,
                            std::size_t num_graphs, std::size_t num_tasks) {
    const std::size_t want = num_graphs * num_tasks;
    if (scores.size() != want || labels.size() != want || mask.size() != want)
        throw ShapeError("multi_task_auc: matrix sizes not aligned");
    MultiTaskAuc out;
    out.per_task.resize(num_tasks);
    double sum = 0.0;
    for (std::size_t t = 0; t < num_tasks; ++t) {
        std::vector<double> s;
        std::vector<int> y;
        for (std::size_t g = 0; g < num_graphs; ++g) {
            const std::size_t idx = g * num_tasks + t;
            if (!mask[idx]) continue;
            s.push_back(scores[idx]);
            y.push_back(labels[idx] > 0.5 ? 1 : 0);
        }
        const bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
        const bool has_neg = std::find(y.begin(), y.end(), 0) != y.end();
        if (!has_pos || !has_neg) continue;  // undefined task, skipped
        const double auc = roc_auc(s, y);
        out.per_task[t] = auc;
        sum += auc;
        ++out.defined_count;
    }
    if (out.defined_count == 0) throw ValueError("zero defined tasks");
    out.mean_defined = sum / static_cast<double>(out.defined_count);
    return out;
}

TransferReport transfer_report(const std::vector<double>& pretrained,
                               const std::vector<double>& baseline) {
    if (pretrained.size() != baseline.size())
        throw ShapeError("transfer_report: task lists differ in length");
    if (pretrained.empty())
        throw ShapeError("transfer_report: empty task lists");
    TransferReport rep;
    rep.all_pretrained_above_half = true;
    for (std::size_t t = 0; t < pretrained.size(); ++t) {
        TransferReport::TaskRow row;
        row.task = static_cast<int>(t);
        row.pretrained = pretrained[t];
        row.baseline = baseline[t];
        row.delta = pretrained[t] - baseline[t];
        if (row.delta < 0.0) {
            ++rep.negative_count;
            rep.worst_negative = std::min(rep.worst_negative, row.delta);
        } else {
            ++rep.positive_count;
        }
        if (!(pretrained[t] > 0.5)) rep.all_pretrained_above_half = false;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace gmatch
