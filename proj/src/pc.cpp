#include "sldisco/pc.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <fstream>

#include "sldisco/errors.hpp"
#include "sldisco/graph.hpp"

namespace sldisco::pc {

namespace {

std::string set_to_string(const std::vector<int>& s) {
    std::string out = "{";
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (k) out += ", ";
        out += "X" + std::to_string(s[k] + 1);
    }
    return out + "}";
}

double alpha_threshold(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DataError("fisher-z: alpha must lie in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(),
                                 1.0 - alpha / 2.0);
}

// sqrt(n - |s| - 3) * |atanh(r)| for the partial correlation r of (i, j)
// given s, computed from the inverse of the correlation submatrix.
double fisher_z_statistic(const Eigen::MatrixXd& c, int n, int i, int j,
                          const std::vector<int>& s) {
    const auto ell = static_cast<int>(s.size());
    if (n - ell - 3 < 1)
        throw DataError("fisher-z: n - |s| - 3 must be at least 1");

    // The conditioning set is a set; sort it so the decision cannot depend on
    // the caller's ordering.
    std::vector<int> cond = s;
    std::sort(cond.begin(), cond.end());

    std::vector<int> idx;
    idx.reserve(cond.size() + 2);
    idx.push_back(i);
    idx.push_back(j);
    idx.insert(idx.end(), cond.begin(), cond.end());
    const auto m = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd sub(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b)
            sub(a, b) = c(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);

    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    if (!lu.isInvertible())
        throw NumericError("fisher-z: singular conditioning submatrix for s = " +
                           set_to_string(cond));
    const Eigen::MatrixXd prec = lu.inverse();
    double r = -prec(0, 1) / std::sqrt(prec(0, 0) * prec(1, 1));
    r = std::clamp(r, -0.9999999, 0.9999999);
    return std::sqrt(static_cast<double>(n - ell - 3)) * std::abs(std::atanh(r));
}

}  // namespace

FisherZTest::FisherZTest(Eigen::MatrixXd correlation, int n, double alpha)
    : c_(std::move(correlation)), n_(n), threshold_(alpha_threshold(alpha)) {
    if (c_.rows() != c_.cols()) throw DataError("FisherZTest: matrix is not square");
}

bool FisherZTest::independent(int i, int j, const std::vector<int>& s) const {
    return fisher_z_statistic(c_, n_, i, j, s) <= threshold_;
}

bool fisher_z_independent(const Eigen::MatrixXd& c, int n, int i, int j,
                          const std::vector<int>& s, double alpha) {
    return fisher_z_statistic(c, n, i, j, s) <= alpha_threshold(alpha);
}

OracleTest::OracleTest(PdagMatrix dag) : dag_(std::move(dag)) {
    if (!dag_.is_dag()) throw DataError("OracleTest: input is not a DAG");
}

bool OracleTest::independent(int i, int j, const std::vector<int>& s) const {
    return graph::d_separated(dag_, i, j, s);
}

namespace {

// Lexicographically next size-l combination of indices into a pool.
bool next_combination(std::vector<int>& comb, int pool_size) {
    const int l = static_cast<int>(comb.size());
    for (int k = l - 1; k >= 0; --k) {
        if (comb[static_cast<std::size_t>(k)] < pool_size - (l - k)) {
            ++comb[static_cast<std::size_t>(k)];
            for (int m = k + 1; m < l; ++m)
                comb[static_cast<std::size_t>(m)] = comb[static_cast<std::size_t>(m - 1)] + 1;
            return true;
        }
    }
    return false;
}

bool is_subset_sorted(const std::vector<int>& small, const std::vector<int>& big) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

SkeletonResult pc_skeleton(const CiTest& test) {
    const int p = test.node_count();
    PdagMatrix g(p);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) g.add_undirected(i, j);
    SepsetTable sepsets;

    for (int level = 0;; ++level) {
        bool any_testable = false;
        for (int i = 0; i < p; ++i) {
            for (int j = i + 1; j < p; ++j) {
                if (!g.adjacent(i, j)) continue;
                std::vector<int> adj_i = g.neighbors(i);
                std::erase(adj_i, j);
                std::vector<int> adj_j = g.neighbors(j);
                std::erase(adj_j, i);
                if (static_cast<int>(adj_i.size()) < level &&
                    static_cast<int>(adj_j.size()) < level)
                    continue;
                any_testable = true;

                bool removed = false;
                const auto try_side = [&](const std::vector<int>& pool, bool skip_first_pool) {
                    if (removed || static_cast<int>(pool.size()) < level) return;
                    std::vector<int> comb(static_cast<std::size_t>(level));
                    for (int k = 0; k < level; ++k) comb[static_cast<std::size_t>(k)] = k;
                    do {
                        std::vector<int> s;
                        s.reserve(static_cast<std::size_t>(level));
                        for (int k : comb) s.push_back(pool[static_cast<std::size_t>(k)]);
                        // Subsets of both adjacency sets were already tested
                        // from the first side.
                        if (skip_first_pool && is_subset_sorted(s, adj_i)) continue;
                        if (test.independent(i, j, s)) {
                            g.remove_edge(i, j);
                            sepsets[{i, j}] = s;
                            removed = true;
                            return;
                        }
                    } while (next_combination(comb, static_cast<int>(pool.size())));
                };
                try_side(adj_i, false);
                try_side(adj_j, true);
            }
        }
        if (!any_testable) break;
    }
    return {std::move(g), std::move(sepsets)};
}

PcResult pc(const CiTest& test) {
    auto [g, sepsets] = pc_skeleton(test);
    const int p = g.node_count();
    int conflicts = 0;

    // Orient unshielded triples i - k - j with k outside sepset(i, j).
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            if (g.adjacent(i, j)) continue;
            const auto it = sepsets.find({i, j});
            if (it == sepsets.end()) continue;
            const auto& s = it->second;
            for (int k = 0; k < p; ++k) {
                if (k == i || k == j) continue;
                if (!g.adjacent(i, k) || !g.adjacent(j, k)) continue;
                if (std::find(s.begin(), s.end(), k) != s.end()) continue;
                for (int parent : {i, j}) {
                    if (g.has_directed(k, parent)) ++conflicts;  // overwritten arrowhead
                    g.add_directed(parent, k);
                }
            }
        }
    }

    g = graph::apply_meek_rules(std::move(g));
    return {std::move(g), std::move(sepsets), conflicts};
}

void write_sepsets(const std::filesystem::path& path, const SepsetTable& sepsets) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    for (const auto& [pair, s] : sepsets) {
        out << 'X' << (pair.first + 1) << " X" << (pair.second + 1) << " :";
        for (int v : s) out << " X" << (v + 1);
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace sldisco::pc
