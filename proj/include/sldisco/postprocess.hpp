#pragma once

#include <Eigen/Dense>
#include <array>

#include "sldisco/pdag.hpp"

namespace sldisco::postprocess {

inline constexpr std::array<double, 7> kDefaultTauGrid = {0.01, 0.05, 0.1,
                                                          0.2,  0.3,  0.4, 0.5};

// Elementwise threshold: mark set iff probability strictly exceeds tau;
// diagonal forced to zero. The result is a pseudo-adjacency matrix and need
// not be a proper CPDAG. Requires tau in (0, 1).
PdagMatrix cutoff(const Eigen::MatrixXd& probs, double tau);

// Keep the skeleton; keep arrowheads only on edges that take part in a
// v-structure of g; all other edges become undirected.
PdagMatrix strip_to_pattern(const PdagMatrix& g);

// Backwards PC-orientation repair. Starting from cutoff(probs, tau), repeat:
// zero the remaining mark with the smallest probability (row-major on ties);
// if the matrix became proper, return it; otherwise re-derive orientations
// from skeleton + v-structures via the orientation rules and return that when
// proper. Terminates because the empty graph is proper; the output skeleton
// is always a subgraph of the cutoff skeleton.
PdagMatrix bpco(const Eigen::MatrixXd& probs, double tau);

}  // namespace sldisco::postprocess
