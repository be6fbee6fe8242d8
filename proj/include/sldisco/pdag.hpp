#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sldisco {

// Adjacency-matrix representation of a partially directed graph.
// entry(i, j) is the mark row: entry(i,j)=1 and entry(j,i)=0 encodes the
// directed edge Xj -> Xi (row i lists the incoming marks of Xi), both entries
// 1 encodes the undirected edge Xi - Xj, both 0 means non-adjacent. The same
// matrix type carries DAGs, CPDAGs and the pseudo-graphs produced by
// thresholding, which need not belong to any of those classes.
class PdagMatrix {
public:
    PdagMatrix() = default;
    explicit PdagMatrix(int p) : p_(p), m_(static_cast<std::size_t>(p) * p, 0) {}

    // Rows given in reading order, e.g. {{0,0},{1,0}} is X2 -> X1... see tests.
    static PdagMatrix from_rows(const std::vector<std::vector<int>>& rows);

    int node_count() const { return p_; }

    int entry(int i, int j) const { return m_[static_cast<std::size_t>(i) * p_ + j]; }
    void set_entry(int i, int j, int v) {
        m_[static_cast<std::size_t>(i) * p_ + j] = static_cast<std::uint8_t>(v);
    }

    bool adjacent(int i, int j) const { return entry(i, j) != 0 || entry(j, i) != 0; }
    bool has_directed(int from, int to) const {
        return entry(to, from) == 1 && entry(from, to) == 0;
    }
    bool has_undirected(int i, int j) const {
        return entry(i, j) == 1 && entry(j, i) == 1;
    }

    void add_directed(int from, int to) {
        set_entry(to, from, 1);
        set_entry(from, to, 0);
    }
    void add_undirected(int i, int j) {
        set_entry(i, j, 1);
        set_entry(j, i, 1);
    }
    void remove_edge(int i, int j) {
        set_entry(i, j, 0);
        set_entry(j, i, 0);
    }

    std::vector<int> parents(int i) const;
    std::vector<int> children(int i) const;
    std::vector<int> neighbors(int i) const;             // all adjacent nodes
    std::vector<int> undirected_neighbors(int i) const;

    // Unordered adjacent pairs.
    int edge_count() const;

    bool directed_part_acyclic() const;
    // True iff there are no undirected edges and the graph is acyclic.
    bool is_dag() const;

    // Node indices of a topological order of the directed part
    // (lowest-index-first tie breaking). Throws NumericError on a cycle.
    std::vector<int> topological_order() const;

    bool operator==(const PdagMatrix&) const = default;

    // Headerless CSV of 0/1 entries, one row per line.
    static PdagMatrix read_adj_csv(const std::filesystem::path& path);
    void write_adj_csv(const std::filesystem::path& path) const;

    std::string to_string() const;

private:
    int p_ = 0;
    std::vector<std::uint8_t> m_;
};

}  // namespace sldisco
