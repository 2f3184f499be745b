#include "heatprop/graph.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include "heatprop/rng.hpp"

namespace heatprop {

LaplacianKind parse_laplacian_kind(const std::string& name) {
    if (name == "combinatorial") return LaplacianKind::Combinatorial;
    if (name == "sym") return LaplacianKind::SymNormalized;
    if (name == "sym-selfloops") return LaplacianKind::SymNormalizedSelfLoops;
    if (name == "randomwalk") return LaplacianKind::RandomWalk;
    throw UsageError("unknown laplacian kind '" + name +
                     "' (expected combinatorial|sym|sym-selfloops|randomwalk)");
}

std::string laplacian_kind_name(LaplacianKind kind) {
    switch (kind) {
        case LaplacianKind::Combinatorial: return "combinatorial";
        case LaplacianKind::SymNormalized: return "sym";
        case LaplacianKind::SymNormalizedSelfLoops: return "sym-selfloops";
        case LaplacianKind::RandomWalk: return "randomwalk";
    }
    return "?";
}

Graph build_graph(const std::vector<Edge>& edge_list, int n) {
    if (n < 0) throw UsageError("node count must be non-negative");
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(edge_list.size() * 2);
    for (const Edge& e : edge_list) {
        if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n)
            throw DataError("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                            ") out of range for n=" + std::to_string(n));
        if (e.i == e.j)
            throw DataError("self-loop at node " + std::to_string(e.i) +
                            " rejected; use the sym-selfloops laplacian kind instead");
        if (!(e.w > 0.0))
            throw DataError("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                            ") has non-positive weight " + std::to_string(e.w));
        trips.emplace_back(e.i, e.j, e.w);
        trips.emplace_back(e.j, e.i, e.w);
    }
    Graph g;
    g.n = n;
    g.weights.resize(n, n);
    g.weights.setFromTriplets(trips.begin(), trips.end());  // duplicates sum
    g.weights.makeCompressed();
    g.degrees = g.weights * Vector::Ones(n);
    return g;
}

Graph load_edge_list(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open edge list '" + path + "'");
    std::vector<Edge> edges;
    int max_idx = -1;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        long long i, j;
        double w = 1.0;
        if (!(ls >> i >> j))
            throw DataError(path + ":" + std::to_string(lineno) + ": expected 'i j [w]'");
        ls >> w;  // optional third field
        std::string rest;
        if (ls >> rest)
            throw DataError(path + ":" + std::to_string(lineno) + ": trailing tokens after weight");
        if (i < 0 || j < 0)
            throw DataError(path + ":" + std::to_string(lineno) + ": negative node id");
        edges.push_back({static_cast<int>(i), static_cast<int>(j), w});
        max_idx = std::max<long long>(max_idx, std::max(i, j));
    }
    if (n < 0) n = max_idx + 1;
    return build_graph(edges, n);
}

namespace {

Vector checked_degrees(const Graph& g, const char* kind_name) {
    for (int i = 0; i < g.n; ++i)
        if (g.degrees[i] <= 0.0)
            throw DataError(std::string("node ") + std::to_string(i) +
                            " has zero degree; " + kind_name + " laplacian needs d_i > 0");
    return g.degrees;
}

} // namespace

namespace {

// I minus W with every entry w_ij scaled by row[i]*col[j]; keeps sparsity.
Sparse identity_minus_scaled(const Sparse& W, const Vector& row, const Vector& col) {
    const int n = static_cast<int>(W.rows());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(W.nonZeros() + n);
    for (int i = 0; i < n; ++i) trips.emplace_back(i, i, 1.0);
    for (int i = 0; i < n; ++i)
        for (Sparse::InnerIterator it(W, i); it; ++it)
            trips.emplace_back(i, static_cast<int>(it.col()),
                               -it.value() * row[i] * col[it.col()]);
    Sparse L(n, n);
    L.setFromTriplets(trips.begin(), trips.end());
    L.makeCompressed();
    return L;
}

} // namespace

Sparse laplacian(const Graph& g, LaplacianKind kind) {
    const int n = g.n;
    switch (kind) {
        case LaplacianKind::Combinatorial: {
            std::vector<Eigen::Triplet<double>> trips;
            trips.reserve(g.weights.nonZeros() + n);
            for (int i = 0; i < n; ++i)
                if (g.degrees[i] != 0.0) trips.emplace_back(i, i, g.degrees[i]);
            for (int i = 0; i < n; ++i)
                for (Sparse::InnerIterator it(g.weights, i); it; ++it)
                    trips.emplace_back(i, static_cast<int>(it.col()), -it.value());
            Sparse L(n, n);
            L.setFromTriplets(trips.begin(), trips.end());
            L.makeCompressed();
            return L;
        }
        case LaplacianKind::SymNormalized: {
            const Vector s = checked_degrees(g, "sym").array().rsqrt();
            return identity_minus_scaled(g.weights, s, s);
        }
        case LaplacianKind::SymNormalizedSelfLoops: {
            // A~ = W + I, D~ = D + I; identity_minus_scaled handles the W part,
            // the self-loop part shifts the diagonal by 1/dt_i.
            const Vector dt = (g.degrees.array() + 1.0).matrix();
            const Vector s = dt.array().rsqrt();
            Sparse L = identity_minus_scaled(g.weights, s, s);
            for (int i = 0; i < n; ++i) L.coeffRef(i, i) -= 1.0 / dt[i];
            L.makeCompressed();
            return L;
        }
        case LaplacianKind::RandomWalk: {
            const Vector dinv = checked_degrees(g, "randomwalk").cwiseInverse();
            return identity_minus_scaled(g.weights, dinv, Vector::Ones(n));
        }
    }
    throw UsageError("unhandled laplacian kind");
}

bool is_connected(const Graph& g) {
    if (g.n == 0) return true;
    std::vector<char> seen(g.n, 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    int visited = 1;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (Sparse::InnerIterator it(g.weights, u); it; ++it) {
            const int v = static_cast<int>(it.col());
            if (!seen[v]) {
                seen[v] = 1;
                ++visited;
                queue.push_back(v);
            }
        }
    }
    return visited == g.n;
}

Projector projector(const Graph& g, LaplacianKind kind) {
    if (!is_connected(g))
        throw DataError("graph is disconnected; the kernel projector is only rank one on "
                        "connected graphs");
    Projector p;
    p.kind = kind;
    switch (kind) {
        case LaplacianKind::Combinatorial:
        case LaplacianKind::RandomWalk:
            p.v = Vector::Constant(g.n, 1.0 / std::sqrt(static_cast<double>(g.n)));
            break;
        case LaplacianKind::SymNormalized:
            p.v = checked_degrees(g, "sym").array().sqrt();
            p.v.normalize();
            break;
        case LaplacianKind::SymNormalizedSelfLoops:
            p.v = (g.degrees.array() + 1.0).sqrt();
            p.v.normalize();
            break;
    }
    return p;
}

LambdaMaxResult lambda_max(const Sparse& L, double tol, int max_iters) {
    LambdaMaxResult res;
    const int n = static_cast<int>(L.rows());
    if (n == 0) return res;

    Rng rng(0x9d2c5680f1ee7a3bULL);  // fixed seed: results must not drift between runs
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = normal01(rng);
    v.normalize();

    double lam = 0.0;
    for (int it = 1; it <= max_iters; ++it) {
        Vector w = L * v;
        const double norm = w.norm();
        if (norm == 0.0) {
            res.value = 0.0;  // L annihilates the start vector; spectrum is {0}
            res.iterations = it;
            return res;
        }
        const double next = v.dot(w);
        w /= norm;
        const bool settled = std::abs(next - lam) <= tol * std::max(1.0, std::abs(next));
        lam = next;
        v = w;
        if (settled && it > 5) {
            res.value = std::max(lam, 0.0);
            res.iterations = it;
            return res;
        }
    }

    // Power iteration stalled (near-degenerate leading eigenvalues); the
    // Gershgorin row bound always dominates the spectrum.
    double bound = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (Sparse::InnerIterator it(L, i); it; ++it) row += std::abs(it.value());
        bound = std::max(bound, row);
    }
    res.value = bound;
    res.used_gershgorin_fallback = true;
    res.iterations = max_iters;
    return res;
}

} // namespace heatprop
