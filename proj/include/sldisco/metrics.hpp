#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "sldisco/pdag.hpp"

namespace sldisco::metrics {

struct ConfusionCounts {
    long tp = 0;
    long tn = 0;
    long fp = 0;
    long fn = 0;
};

// Unordered-pair adjacency census: TP adjacent in both, TN in neither,
// FP only in est, FN only in truth. The four counts sum to p(p-1)/2.
ConfusionCounts adjacency_confusion(const PdagMatrix& est, const PdagMatrix& truth);

// Endpoint census over pairs adjacent in BOTH graphs. Each shared edge
// contributes its two endpoints; an arrowhead is a positive, a tail a
// negative (an undirected edge has tails at both ends).
ConfusionCounts orientation_confusion(const PdagMatrix& est, const PdagMatrix& truth);

enum class Ratio { npv, precision, recall, specificity };

// Ratio value plus a degeneracy marker. A 0/0 ratio resolves to 1 and is
// flagged so corpus averages can exclude it if desired.
struct MetricValue {
    double value = 0.0;
    bool degenerate = false;
};

MetricValue metric(const ConfusionCounts& c, Ratio which);
MetricValue f1(const ConfusionCounts& c);  // harmonic mean of precision and recall
MetricValue g1(const ConfusionCounts& c);  // harmonic mean of NPV and specificity

int edge_count(const PdagMatrix& g);

struct MetricsReport {
    MetricValue adj_npv, adj_f1, adj_precision, adj_recall;
    MetricValue ori_precision, ori_g1, ori_npv, ori_specificity;
    int est_edges = 0;
    int true_edges = 0;
};

MetricsReport evaluate(const PdagMatrix& est, const PdagMatrix& truth);

// Mean of each metric over a corpus, plus strata over quartiles of the true
// edge count (inclusive lower boundaries taken from order statistics of the
// evaluated corpus itself).
struct AggregateReport {
    MetricsReport mean;
    int count = 0;
    double mean_est_edges = 0.0;
    double mean_true_edges = 0.0;
    std::array<MetricsReport, 4> quartile;       // by true edge count
    std::array<int, 4> quartile_count{0, 0, 0, 0};
    std::array<double, 4> quartile_est_edges{0, 0, 0, 0};
    std::array<double, 4> quartile_true_edges{0, 0, 0, 0};
    std::array<int, 3> quartile_bounds{0, 0, 0};
};

// include_degenerate=false drops flagged instances from each metric's mean
// (each metric keeps its own instance set).
AggregateReport aggregate(const std::vector<MetricsReport>& rows,
                          bool include_degenerate = true);

// One CSV row per instance plus trailing aggregate rows tagged in the first
// column.
void write_report_csv(const std::filesystem::path& path,
                      const std::vector<MetricsReport>& rows,
                      const AggregateReport& agg);

// Plain-text table: one row per labelled aggregate with the four headline
// columns (Adj. F1, Adj. NPV, Ori. G1, Ori. precision).
std::string summary_table(
    const std::vector<std::pair<std::string, AggregateReport>>& methods);

}  // namespace sldisco::metrics
