#pragma once

#include <compare>
#include <optional>
#include <vector>

#include "sldisco/pdag.hpp"

namespace sldisco::graph {

// Unshielded collider parent_lo -> collider <- parent_hi with non-adjacent
// parents. Stored with parent_lo < parent_hi so the set ordering is canonical.
struct VStructure {
    int collider;
    int parent_lo;
    int parent_hi;
    auto operator<=>(const VStructure&) const = default;
};

// Undirected copy: every edge of g becomes an undirected edge.
PdagMatrix skeleton(const PdagMatrix& g);

// All v-structures, sorted by (collider, parent_lo, parent_hi).
std::vector<VStructure> v_structures(const PdagMatrix& g);

// d-separation of i and j given s in a DAG. Linear-time reachability over
// (node, approach-direction) states. Throws on non-DAG input, i == j, or
// i/j inside s.
bool d_separated(const PdagMatrix& dag, int i, int j, const std::vector<int>& s);

// Same skeleton and same v-structure set. Throws on non-DAG input.
bool markov_equivalent(const PdagMatrix& d1, const PdagMatrix& d2);

// Closure under the four orientation-propagation rules:
//   R1: a->b, b-c, a,c non-adjacent        => b->c
//   R2: a->b, b->c, a-c                    => a->c
//   R3: a-b, a-c, a-d, c->b, d->b, c,d n/a => a->b
//   R4: a-b, a-c, a-d, d->c, c->b, b,d n/a => a->b
// Only undirected edges become directed; adjacencies never change. The input
// must have an acyclic directed part for the output to stay acyclic; the
// iteration itself terminates on any input.
PdagMatrix apply_meek_rules(PdagMatrix g);

// Markov-equivalence-class representative of a DAG: skeleton plus v-structure
// arrows, completed by apply_meek_rules. Throws on non-DAG input.
PdagMatrix dag_to_cpdag(const PdagMatrix& dag);

// A DAG with g's skeleton that keeps every directed edge of g and creates no
// new v-structure (sink-peeling with lowest-index tie breaking), or nullopt
// when no such DAG exists.
std::optional<PdagMatrix> consistent_extension(const PdagMatrix& g);

// True iff g is exactly the class representative of some DAG: a consistent
// extension exists and dag_to_cpdag of it reproduces g.
bool is_proper_cpdag(const PdagMatrix& g);

}  // namespace sldisco::graph
