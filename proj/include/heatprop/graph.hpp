// Sparse undirected weighted graph, Laplacian construction, kernel projector.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "heatprop/errors.hpp"

namespace heatprop {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Row-major so row slices align with per-node neighbor scans.
using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Edge {
    int i;
    int j;
    double w;
};

// Symmetric weight matrix stored explicitly in both directions plus cached
// row sums. Immutable after construction.
struct Graph {
    int n = 0;
    Sparse weights;  // W, zero diagonal
    Vector degrees;  // d_i = sum_j W_ij

    double volume() const { return degrees.sum(); }
};

enum class LaplacianKind {
    Combinatorial,          // D - W
    SymNormalized,          // I - D^{-1/2} W D^{-1/2}
    SymNormalizedSelfLoops, // I - Dt^{-1/2} (W + I) Dt^{-1/2}, Dt = D + I
    RandomWalk,             // I - D^{-1} W (not symmetric)
};

LaplacianKind parse_laplacian_kind(const std::string& name);
std::string laplacian_kind_name(LaplacianKind kind);

// Rank-one orthogonal projector onto the Laplacian kernel, Pi = v v^T.
struct Projector {
    LaplacianKind kind;
    Vector v;  // unit kernel vector

    Matrix apply(const Matrix& u) const { return v * (v.transpose() * u); }
    Vector apply(const Vector& u) const { return v * v.dot(u); }
};

struct LambdaMaxResult {
    double value = 0.0;
    bool used_gershgorin_fallback = false;
    int iterations = 0;
};

// Duplicate (i,j) entries are summed and every edge is mirrored. Self-loops
// and non-positive weights are rejected; the self-loop Laplacian kind adds
// its own loops internally.
Graph build_graph(const std::vector<Edge>& edge_list, int n);

// Text format: one "i j [w]" per line, w defaults to 1.0, '#' starts a
// comment line. When n < 0 the node count is max index + 1.
Graph load_edge_list(const std::string& path, int n = -1);

Sparse laplacian(const Graph& g, LaplacianKind kind);

bool is_connected(const Graph& g);

// Requires a connected graph: the rank-one form assumes a 1-dim kernel.
Projector projector(const Graph& g, LaplacianKind kind);

// Power iteration with a fixed internal seed; falls back to the Gershgorin
// row bound when the iteration stalls. Callers feeding Chebyshev must scale
// the result by a safety factor (an underestimate breaks the mapping).
LambdaMaxResult lambda_max(const Sparse& L, double tol = 1e-6, int max_iters = 2000);

inline double cheb_lambda_bound(const Sparse& L) { return lambda_max(L).value * 1.01; }

} // namespace heatprop
