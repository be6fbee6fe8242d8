#pragma once

#include <Eigen/Dense>
#include <array>
#include <filesystem>
#include <map>
#include <utility>
#include <vector>

#include "sldisco/pdag.hpp"

namespace sldisco::pc {

inline constexpr std::array<double, 9> kDefaultAlphaGrid = {
    1e-8, 1e-4, 1e-3, 0.01, 0.05, 0.1, 0.2, 0.5, 0.8};

// Conditional independence decision oracle for the skeleton search.
class CiTest {
public:
    virtual ~CiTest() = default;
    virtual bool independent(int i, int j, const std::vector<int>& s) const = 0;
    virtual int node_count() const = 0;
};

// Vanishing-partial-correlation test under joint Gaussianity. The partial
// correlation of (i, j) given s comes from inverting the (|s|+2)x(|s|+2)
// correlation submatrix; independence is declared when
// sqrt(n - |s| - 3) * |atanh(r)| <= Phi^-1(1 - alpha/2).
class FisherZTest : public CiTest {
public:
    FisherZTest(Eigen::MatrixXd correlation, int n, double alpha);
    bool independent(int i, int j, const std::vector<int>& s) const override;
    int node_count() const override { return static_cast<int>(c_.rows()); }

private:
    Eigen::MatrixXd c_;
    int n_;
    double threshold_;
};

// Exact test backed by d-separation in a known DAG.
class OracleTest : public CiTest {
public:
    explicit OracleTest(PdagMatrix dag);
    bool independent(int i, int j, const std::vector<int>& s) const override;
    int node_count() const override { return dag_.node_count(); }

private:
    PdagMatrix dag_;
};

bool fisher_z_independent(const Eigen::MatrixXd& c, int n, int i, int j,
                          const std::vector<int>& s, double alpha);

// Separating sets found during the skeleton phase, keyed by the unordered
// pair (lo, hi). A pair has an entry iff its edge was removed.
using SepsetTable = std::map<std::pair<int, int>, std::vector<int>>;

struct SkeletonResult {
    PdagMatrix graph;
    SepsetTable sepsets;
};

// Classic sequential skeleton search: starting from the complete graph, for
// growing subset size l test every still-adjacent pair against the size-l
// subsets of adj(i)\{j} and then adj(j)\{i} (duplicates skipped), removing
// the edge at the first independence. Subset enumeration is lexicographic
// over sorted neighbor lists.
SkeletonResult pc_skeleton(const CiTest& test);

struct PcResult {
    PdagMatrix graph;
    SepsetTable sepsets;
    int orientation_conflicts = 0;
};

// Skeleton search, v-structure orientation from separating sets (last write
// wins on conflicts, counted in the result), then the orientation rules.
// Under assumption violations the output may fail is_proper_cpdag; it is
// returned unrepaired.
PcResult pc(const CiTest& test);

void write_sepsets(const std::filesystem::path& path, const SepsetTable& sepsets);

}  // namespace sldisco::pc
