#include "sldisco/graph.hpp"

#include <algorithm>
#include <array>
#include <deque>

#include "sldisco/errors.hpp"

namespace sldisco::graph {

PdagMatrix skeleton(const PdagMatrix& g) {
    const int p = g.node_count();
    PdagMatrix out(p);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (g.adjacent(i, j)) out.add_undirected(i, j);
    return out;
}

std::vector<VStructure> v_structures(const PdagMatrix& g) {
    const int p = g.node_count();
    std::vector<VStructure> out;
    for (int c = 0; c < p; ++c) {
        const auto pa = g.parents(c);
        for (std::size_t x = 0; x < pa.size(); ++x)
            for (std::size_t y = x + 1; y < pa.size(); ++y)
                if (!g.adjacent(pa[x], pa[y]))
                    out.push_back({c, pa[x], pa[y]});
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool d_separated(const PdagMatrix& dag, int i, int j, const std::vector<int>& s) {
    if (!dag.is_dag()) throw DataError("d_separated: input is not a DAG");
    if (i == j) throw DataError("d_separated: i and j must differ");
    const int p = dag.node_count();
    std::vector<bool> in_s(p, false);
    for (int v : s) in_s[v] = true;
    if (in_s[i] || in_s[j]) throw DataError("d_separated: endpoints inside the conditioning set");

    // Ancestors of s (including s itself); colliders in this set can pass.
    std::vector<bool> anc(p, false);
    std::deque<int> work(s.begin(), s.end());
    for (int v : s) anc[v] = true;
    while (!work.empty()) {
        const int v = work.front();
        work.pop_front();
        for (int u : dag.parents(v))
            if (!anc[u]) {
                anc[u] = true;
                work.push_back(u);
            }
    }

    // Reachability over (node, direction) where direction records whether the
    // node was entered through an incoming edge (from a parent) or an
    // outgoing one (from a child).
    enum { FromChild = 0, FromParent = 1 };
    std::vector<std::array<bool, 2>> seen(p, {false, false});
    std::deque<std::pair<int, int>> queue;
    queue.push_back({i, FromChild});
    seen[i][FromChild] = true;
    while (!queue.empty()) {
        const auto [v, dir] = queue.front();
        queue.pop_front();
        if (v == j) return false;
        const auto push = [&](int u, int d) {
            if (!seen[u][d]) {
                seen[u][d] = true;
                queue.push_back({u, d});
            }
        };
        if (dir == FromChild) {
            if (!in_s[v]) {
                for (int u : dag.parents(v)) push(u, FromChild);
                for (int u : dag.children(v)) push(u, FromParent);
            }
        } else {
            if (!in_s[v])
                for (int u : dag.children(v)) push(u, FromParent);
            if (anc[v])  // collider with itself or a descendant in s
                for (int u : dag.parents(v)) push(u, FromChild);
        }
    }
    return true;
}

bool markov_equivalent(const PdagMatrix& d1, const PdagMatrix& d2) {
    if (!d1.is_dag() || !d2.is_dag()) throw DataError("markov_equivalent: inputs must be DAGs");
    if (d1.node_count() != d2.node_count())
        throw DataError("markov_equivalent: node counts differ");
    return skeleton(d1) == skeleton(d2) && v_structures(d1) == v_structures(d2);
}

namespace {

// Orient i -> j; returns true when this changed an undirected edge.
bool orient(PdagMatrix& g, int i, int j) {
    if (!g.has_undirected(i, j)) return false;
    g.add_directed(i, j);
    return true;
}

bool meek_pass(PdagMatrix& g) {
    const int p = g.node_count();
    bool changed = false;
    // R1: a->b, b-c, a and c non-adjacent  =>  b->c
    for (int b = 0; b < p; ++b)
        for (int c = 0; c < p; ++c) {
            if (b == c || !g.has_undirected(b, c)) continue;
            for (int a = 0; a < p; ++a) {
                if (a == b || a == c) continue;
                if (g.has_directed(a, b) && !g.adjacent(a, c)) {
                    changed |= orient(g, b, c);
                    break;
                }
            }
        }
    // R2: a->b->c with a-c  =>  a->c
    for (int a = 0; a < p; ++a)
        for (int c = 0; c < p; ++c) {
            if (a == c || !g.has_undirected(a, c)) continue;
            for (int b = 0; b < p; ++b) {
                if (b == a || b == c) continue;
                if (g.has_directed(a, b) && g.has_directed(b, c)) {
                    changed |= orient(g, a, c);
                    break;
                }
            }
        }
    // R3: a-b, a-c, a-d, c->b, d->b, c and d non-adjacent  =>  a->b
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) {
            if (a == b || !g.has_undirected(a, b)) continue;
            bool done = false;
            for (int c = 0; c < p && !done; ++c) {
                if (c == a || c == b) continue;
                if (!g.has_undirected(a, c) || !g.has_directed(c, b)) continue;
                for (int d = c + 1; d < p && !done; ++d) {
                    if (d == a || d == b) continue;
                    if (g.has_undirected(a, d) && g.has_directed(d, b) &&
                        !g.adjacent(c, d)) {
                        changed |= orient(g, a, b);
                        done = true;
                    }
                }
            }
        }
    // R4: a-b, a-c, a-d, d->c, c->b, b and d non-adjacent  =>  a->b
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) {
            if (a == b || !g.has_undirected(a, b)) continue;
            bool done = false;
            for (int c = 0; c < p && !done; ++c) {
                if (c == a || c == b) continue;
                if (!g.has_undirected(a, c) || !g.has_directed(c, b)) continue;
                for (int d = 0; d < p && !done; ++d) {
                    if (d == a || d == b || d == c) continue;
                    if (g.has_undirected(a, d) && g.has_directed(d, c) &&
                        !g.adjacent(b, d)) {
                        changed |= orient(g, a, b);
                        done = true;
                    }
                }
            }
        }
    return changed;
}

}  // namespace

PdagMatrix apply_meek_rules(PdagMatrix g) {
    while (meek_pass(g)) {
    }
    return g;
}

PdagMatrix dag_to_cpdag(const PdagMatrix& dag) {
    if (!dag.is_dag()) throw DataError("dag_to_cpdag: input is not a DAG");
    PdagMatrix g = skeleton(dag);
    for (const auto& vs : v_structures(dag)) {
        g.add_directed(vs.parent_lo, vs.collider);
        g.add_directed(vs.parent_hi, vs.collider);
    }
    return apply_meek_rules(std::move(g));
}

std::optional<PdagMatrix> consistent_extension(const PdagMatrix& g) {
    const int p = g.node_count();
    PdagMatrix work = g;
    PdagMatrix result = g;
    std::vector<bool> removed(p, false);

    for (int step = 0; step < p; ++step) {
        int pick = -1;
        for (int x = 0; x < p && pick < 0; ++x) {
            if (removed[x]) continue;
            // x must be a sink of the directed part...
            bool sink = true;
            for (int j = 0; j < p && sink; ++j)
                if (j != x && !removed[j] && work.has_directed(x, j)) sink = false;
            if (!sink) continue;
            // ...and every undirected neighbor of x must be adjacent to all
            // other neighbors of x, so orienting into x creates no collider.
            bool ok = true;
            for (int y = 0; y < p && ok; ++y) {
                if (y == x || removed[y] || !work.has_undirected(x, y)) continue;
                for (int z = 0; z < p && ok; ++z) {
                    if (z == x || z == y || removed[z]) continue;
                    if (work.adjacent(x, z) && !work.adjacent(y, z)) ok = false;
                }
            }
            if (ok) pick = x;
        }
        if (pick < 0) return std::nullopt;
        for (int y = 0; y < p; ++y)
            if (y != pick && !removed[y] && work.has_undirected(pick, y))
                result.add_directed(y, pick);
        removed[pick] = true;
    }
    return result;
}

bool is_proper_cpdag(const PdagMatrix& g) {
    const auto ext = consistent_extension(g);
    if (!ext) return false;
    return dag_to_cpdag(*ext) == g;
}

}  // namespace sldisco::graph
