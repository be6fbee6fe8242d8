#include "sldisco/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <tuple>
#include <utility>

#include "sldisco/errors.hpp"

namespace sldisco::metrics {

namespace {

void require_same_p(const PdagMatrix& est, const PdagMatrix& truth) {
    if (est.node_count() != truth.node_count())
        throw DataError("metrics: graphs have different node counts");
}

MetricValue ratio(long num, long den) {
    if (den == 0) return {1.0, true};
    return {static_cast<double>(num) / static_cast<double>(den), false};
}

MetricValue harmonic(MetricValue a, MetricValue b) {
    const bool degenerate = a.degenerate && b.degenerate;
    if (a.value == 0.0 && b.value == 0.0) return {0.0, degenerate};
    return {2.0 * a.value * b.value / (a.value + b.value), degenerate};
}

}  // namespace

ConfusionCounts adjacency_confusion(const PdagMatrix& est, const PdagMatrix& truth) {
    require_same_p(est, truth);
    const int p = est.node_count();
    ConfusionCounts c;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            const bool e = est.adjacent(i, j);
            const bool t = truth.adjacent(i, j);
            if (e && t) ++c.tp;
            else if (!e && !t) ++c.tn;
            else if (e) ++c.fp;
            else ++c.fn;
        }
    return c;
}

ConfusionCounts orientation_confusion(const PdagMatrix& est, const PdagMatrix& truth) {
    require_same_p(est, truth);
    const int p = est.node_count();
    ConfusionCounts c;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            if (!est.adjacent(i, j) || !truth.adjacent(i, j)) continue;
            for (const auto [head, tail] : {std::pair{i, j}, std::pair{j, i}}) {
                const bool t_arrow = truth.has_directed(tail, head);
                const bool e_arrow = est.has_directed(tail, head);
                if (e_arrow && t_arrow) ++c.tp;
                else if (!e_arrow && !t_arrow) ++c.tn;
                else if (e_arrow) ++c.fp;
                else ++c.fn;
            }
        }
    return c;
}

MetricValue metric(const ConfusionCounts& c, Ratio which) {
    switch (which) {
        case Ratio::npv: return ratio(c.tn, c.tn + c.fn);
        case Ratio::precision: return ratio(c.tp, c.tp + c.fp);
        case Ratio::recall: return ratio(c.tp, c.tp + c.fn);
        case Ratio::specificity: return ratio(c.tn, c.tn + c.fp);
    }
    throw NumericError("metric: unreachable");
}

MetricValue f1(const ConfusionCounts& c) {
    return harmonic(metric(c, Ratio::precision), metric(c, Ratio::recall));
}

MetricValue g1(const ConfusionCounts& c) {
    return harmonic(metric(c, Ratio::npv), metric(c, Ratio::specificity));
}

int edge_count(const PdagMatrix& g) { return g.edge_count(); }

MetricsReport evaluate(const PdagMatrix& est, const PdagMatrix& truth) {
    const auto adj = adjacency_confusion(est, truth);
    const auto ori = orientation_confusion(est, truth);
    MetricsReport r;
    r.adj_npv = metric(adj, Ratio::npv);
    r.adj_f1 = f1(adj);
    r.adj_precision = metric(adj, Ratio::precision);
    r.adj_recall = metric(adj, Ratio::recall);
    r.ori_precision = metric(ori, Ratio::precision);
    r.ori_g1 = g1(ori);
    r.ori_npv = metric(ori, Ratio::npv);
    r.ori_specificity = metric(ori, Ratio::specificity);
    r.est_edges = edge_count(est);
    r.true_edges = edge_count(truth);
    return r;
}

namespace {

using Field = MetricValue MetricsReport::*;

constexpr std::array<Field, 8> kFields = {
    &MetricsReport::adj_npv,       &MetricsReport::adj_f1,
    &MetricsReport::adj_precision, &MetricsReport::adj_recall,
    &MetricsReport::ori_precision, &MetricsReport::ori_g1,
    &MetricsReport::ori_npv,       &MetricsReport::ori_specificity};

MetricsReport mean_of(const std::vector<const MetricsReport*>& rows,
                      bool include_degenerate) {
    MetricsReport out;
    if (rows.empty()) return out;
    for (Field f : kFields) {
        double sum = 0.0;
        int used = 0;
        bool any_degenerate = false;
        for (const auto* r : rows) {
            const MetricValue v = r->*f;
            any_degenerate |= v.degenerate;
            if (!include_degenerate && v.degenerate) continue;
            sum += v.value;
            ++used;
        }
        (out.*f).value = used ? sum / used : 0.0;
        (out.*f).degenerate = any_degenerate;
    }
    return out;
}

std::pair<double, double> mean_edges(const std::vector<const MetricsReport*>& rows) {
    if (rows.empty()) return {0.0, 0.0};
    double est = 0.0, tru = 0.0;
    for (const auto* r : rows) {
        est += r->est_edges;
        tru += r->true_edges;
    }
    return {est / static_cast<double>(rows.size()), tru / static_cast<double>(rows.size())};
}

}  // namespace

AggregateReport aggregate(const std::vector<MetricsReport>& rows, bool include_degenerate) {
    AggregateReport agg;
    agg.count = static_cast<int>(rows.size());
    if (rows.empty()) return agg;

    std::vector<const MetricsReport*> all;
    all.reserve(rows.size());
    for (const auto& r : rows) all.push_back(&r);
    agg.mean = mean_of(all, include_degenerate);
    std::tie(agg.mean_est_edges, agg.mean_true_edges) = mean_edges(all);

    // Quartile boundaries from the order statistics of the true edge counts:
    // boundary k sits at 1-based index floor(N*k/4) + 1, and each stratum
    // includes its lower boundary.
    std::vector<int> counts;
    counts.reserve(rows.size());
    for (const auto& r : rows) counts.push_back(r.true_edges);
    std::sort(counts.begin(), counts.end());
    const auto n = static_cast<long>(counts.size());
    for (int k = 1; k <= 3; ++k) {
        long idx = n * k / 4;  // floor
        if (idx >= n) idx = n - 1;
        agg.quartile_bounds[static_cast<std::size_t>(k - 1)] =
            counts[static_cast<std::size_t>(idx)];
    }

    std::array<std::vector<const MetricsReport*>, 4> strata;
    for (const auto& r : rows) {
        int s = 0;
        while (s < 3 && r.true_edges >= agg.quartile_bounds[static_cast<std::size_t>(s)]) ++s;
        strata[static_cast<std::size_t>(s)].push_back(&r);
    }
    for (int s = 0; s < 4; ++s) {
        const auto& members = strata[static_cast<std::size_t>(s)];
        agg.quartile[static_cast<std::size_t>(s)] = mean_of(members, include_degenerate);
        agg.quartile_count[static_cast<std::size_t>(s)] = static_cast<int>(members.size());
        std::tie(agg.quartile_est_edges[static_cast<std::size_t>(s)],
                 agg.quartile_true_edges[static_cast<std::size_t>(s)]) = mean_edges(members);
    }
    return agg;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

void write_metric_cells(std::ofstream& out, const MetricsReport& r) {
    for (Field f : kFields)
        out << ',' << fmt((r.*f).value) << ',' << ((r.*f).degenerate ? 1 : 0);
}

}  // namespace

void write_report_csv(const std::filesystem::path& path,
                      const std::vector<MetricsReport>& rows,
                      const AggregateReport& agg) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "row,adj_npv,adj_npv_degenerate,adj_f1,adj_f1_degenerate,"
           "adj_precision,adj_precision_degenerate,adj_recall,adj_recall_degenerate,"
           "ori_precision,ori_precision_degenerate,ori_g1,ori_g1_degenerate,"
           "ori_npv,ori_npv_degenerate,ori_specificity,ori_specificity_degenerate,"
           "est_edges,true_edges\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out << k;
        write_metric_cells(out, rows[k]);
        out << ',' << rows[k].est_edges << ',' << rows[k].true_edges << '\n';
    }
    out << "mean";
    write_metric_cells(out, agg.mean);
    out << ',' << fmt(agg.mean_est_edges) << ',' << fmt(agg.mean_true_edges) << '\n';
    for (int s = 0; s < 4; ++s) {
        out << "quartile" << (s + 1);
        write_metric_cells(out, agg.quartile[static_cast<std::size_t>(s)]);
        out << ',' << fmt(agg.quartile_est_edges[static_cast<std::size_t>(s)]) << ','
            << fmt(agg.quartile_true_edges[static_cast<std::size_t>(s)]) << '\n';
    }
    if (!out) throw DataError("write failed: " + path.string());
}

std::string summary_table(
    const std::vector<std::pair<std::string, AggregateReport>>& methods) {
    std::string s = "Method                     Adj. F1  Adj. NPV  Ori. G1  Ori. precision\n";
    char buf[160];
    for (const auto& [name, agg] : methods) {
        std::snprintf(buf, sizeof(buf), "%-26s %7.3f %9.3f %8.3f %15.3f\n", name.c_str(),
                      agg.mean.adj_f1.value, agg.mean.adj_npv.value,
                      agg.mean.ori_g1.value, agg.mean.ori_precision.value);
        s += buf;
    }
    return s;
}

}  // namespace sldisco::metrics
