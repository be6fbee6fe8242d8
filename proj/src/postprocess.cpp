#include "sldisco/postprocess.hpp"

#include "sldisco/errors.hpp"
#include "sldisco/graph.hpp"

namespace sldisco::postprocess {

PdagMatrix cutoff(const Eigen::MatrixXd& probs, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw DataError("cutoff: tau must lie in (0, 1)");
    if (probs.rows() != probs.cols()) throw DataError("cutoff: matrix is not square");
    const int p = static_cast<int>(probs.rows());
    PdagMatrix g(p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (i != j && probs(i, j) > tau) g.set_entry(i, j, 1);
    return g;
}

PdagMatrix strip_to_pattern(const PdagMatrix& g) {
    PdagMatrix out = graph::skeleton(g);
    for (const auto& vs : graph::v_structures(g)) {
        out.add_directed(vs.parent_lo, vs.collider);
        out.add_directed(vs.parent_hi, vs.collider);
    }
    return out;
}

PdagMatrix bpco(const Eigen::MatrixXd& probs, double tau) {
    PdagMatrix m = cutoff(probs, tau);
    if (graph::is_proper_cpdag(m)) return m;
    const int p = m.node_count();
    for (;;) {
        // Zero the surviving mark with the smallest probability.
        int bi = -1, bj = -1;
        double best = 0.0;
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j)
                if (m.entry(i, j) == 1 && (bi < 0 || probs(i, j) < best)) {
                    best = probs(i, j);
                    bi = i;
                    bj = j;
                }
        if (bi < 0) return m;  // empty graph, proper by definition
        m.set_entry(bi, bj, 0);
        if (graph::is_proper_cpdag(m)) return m;
        const PdagMatrix repaired = graph::apply_meek_rules(strip_to_pattern(m));
        if (graph::is_proper_cpdag(repaired)) return repaired;
    }
}

}  // namespace sldisco::postprocess
