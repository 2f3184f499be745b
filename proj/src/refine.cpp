#include "heatprop/refine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "heatprop/rng.hpp"

namespace heatprop {

EmbeddingSet load_embeddings(const std::string& csv_path, const std::string& attention_path,
                             int n_hint) {
    std::ifstream in(csv_path);
    if (!in) throw DataError("cannot open embeddings file '" + csv_path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw DataError(csv_path + ":" + std::to_string(lineno) +
                                ": cannot parse '" + cell + "' as a number");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError(csv_path + ":" + std::to_string(lineno) +
                            ": inconsistent column count");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("embeddings file '" + csv_path + "' is empty");
    if (n_hint >= 0 && static_cast<int>(rows.size()) != n_hint)
        throw DataError("embeddings row count " + std::to_string(rows.size()) +
                        " does not match the graph size " + std::to_string(n_hint));

    EmbeddingSet emb;
    emb.Z.resize(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (int i = 0; i < emb.Z.rows(); ++i) {
        for (int j = 0; j < emb.Z.cols(); ++j) emb.Z(i, j) = rows[i][j];
        if (emb.Z.row(i).norm() == 0.0)
            throw DataError("embedding row " + std::to_string(i) +
                            " is all-zero; cosine similarity is undefined");
    }

    if (!attention_path.empty()) {
        std::ifstream att(attention_path);
        if (!att) throw DataError("cannot open attention file '" + attention_path + "'");
        const int n = static_cast<int>(emb.Z.rows());
        std::vector<Eigen::Triplet<double>> trips;
        lineno = 0;
        while (std::getline(att, line)) {
            ++lineno;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            std::istringstream ls(line);
            int i, j;
            double w;
            if (!(ls >> i >> j >> w))
                throw DataError(attention_path + ":" + std::to_string(lineno) +
                                ": expected 'i j weight'");
            if (i < 0 || i >= n || j < 0 || j >= n)
                throw DataError(attention_path + ":" + std::to_string(lineno) +
                                ": node id out of range");
            if (w < 0.0 || w > 1.0)
                throw DataError(attention_path + ":" + std::to_string(lineno) +
                                ": attention weight must lie in [0, 1]");
            trips.emplace_back(i, j, w);
            if (i != j) trips.emplace_back(j, i, w);
        }
        Sparse A(n, n);
        A.setFromTriplets(trips.begin(), trips.end(),
                          [](double a, double b) { return std::max(a, b); });
        emb.attention = std::move(A);
    }
    return emb;
}

Matrix cosine_similarity(const Matrix& Z) {
    const int n = static_cast<int>(Z.rows());
    Matrix N(n, Z.cols());
    for (int i = 0; i < n; ++i) {
        const double norm = Z.row(i).norm();
        if (norm == 0.0)
            throw DataError("embedding row " + std::to_string(i) +
                            " is all-zero; cosine similarity is undefined");
        N.row(i) = Z.row(i) / norm;
    }
    Matrix S = N * N.transpose();
    S = S.cwiseMax(-1.0).cwiseMin(1.0);
    S.diagonal().setOnes();
    return S;
}

Matrix gaussian_embedding_similarity(const Matrix& Z, double sigma) {
    const int n = static_cast<int>(Z.rows());
    if (sigma <= 0.0) {
        // Median pairwise distance over a fixed-seed 1000-pair sample keeps
        // the bandwidth deterministic and O(n) regardless of graph size.
        Rng rng(0x8f1bbcdcbfa53e0bULL);
        std::vector<double> dists;
        const int pairs = 1000;
        dists.reserve(pairs);
        for (int p = 0; p < pairs; ++p) {
            const int i = static_cast<int>(uniform_index(rng, n));
            int j = static_cast<int>(uniform_index(rng, n));
            if (i == j) j = (j + 1) % n;
            dists.push_back((Z.row(i) - Z.row(j)).norm());
        }
        std::nth_element(dists.begin(), dists.begin() + pairs / 2, dists.end());
        sigma = dists[pairs / 2];
        if (sigma <= 0.0)
            throw NumericalError("automatic bandwidth is zero; embeddings collapse to a point");
    }
    Matrix S(n, n);
    for (int i = 0; i < n; ++i) {
        S(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) {
            const double d2 = (Z.row(i) - Z.row(j)).squaredNorm();
            const double v = std::exp(-d2 / (2.0 * sigma * sigma));
            S(i, j) = v;
            S(j, i) = v;
        }
    }
    return S;
}

std::vector<std::vector<int>> hop_distances(const Graph& g) {
    std::vector<std::vector<int>> dist(g.n, std::vector<int>(g.n, -1));
    for (int src = 0; src < g.n; ++src) {
        auto& d = dist[src];
        d[src] = 0;
        std::deque<int> queue{src};
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (Sparse::InnerIterator it(g.weights, u); it; ++it) {
                const int v = static_cast<int>(it.col());
                if (d[v] < 0) {
                    d[v] = d[u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    return dist;
}

Matrix structural_similarity(const Graph& g) {
    const auto dist = hop_distances(g);
    Matrix S(g.n, g.n);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            S(i, j) = dist[i][j] < 0 ? 0.0 : std::exp(-static_cast<double>(dist[i][j]));
    return S;
}

Matrix combine_similarities(double w1, const Matrix& S1, double w2, const Matrix& S2, double w3,
                            const Matrix& S3) {
    if (w1 < 0.0 || w2 < 0.0 || w3 < 0.0)
        throw UsageError("combination weights must be non-negative");
    return w1 * S1 + w2 * S2 + w3 * S3;
}

Sparse threshold_sparsify(const Matrix& M, double epsilon, const Graph& original,
                          int* dropped_nonpositive) {
    const int n = static_cast<int>(M.rows());
    if (original.n != n) throw UsageError("matrix size does not match the graph");
    int dropped = 0;
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const bool original_edge = original.weights.coeff(i, j) != 0.0;
            const double v = M(i, j);
            if (!(v > epsilon) && !original_edge) continue;
            if (v <= 0.0) {
                ++dropped;  // kept by the edge clause but unusable as a weight
                continue;
            }
            trips.emplace_back(i, j, v);
            trips.emplace_back(j, i, v);
        }
    }
    if (dropped_nonpositive) *dropped_nonpositive = dropped;
    Sparse W(n, n);
    W.setFromTriplets(trips.begin(), trips.end());
    W.makeCompressed();
    return W;
}

namespace {

// First k column indices of row i ordered by (value desc, index asc).
std::vector<int> top_k_by_value(const std::vector<std::pair<double, int>>& scored, int k) {
    std::vector<std::pair<double, int>> s = scored;
    std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<int> out;
    for (int r = 0; r < std::min<int>(k, static_cast<int>(s.size())); ++r)
        out.push_back(s[r].second);
    return out;
}

} // namespace

std::vector<int> anomaly_scores(const Graph& g, const Matrix& Z, int k) {
    if (k < 1) throw UsageError("neighborhood size must be at least 1");
    if (Z.rows() != g.n) throw UsageError("embedding row count does not match the graph");
    const Matrix S = cosine_similarity(Z);

    std::vector<int> scores(g.n, 0);
    for (int i = 0; i < g.n; ++i) {
        std::vector<std::pair<double, int>> adj;
        for (Sparse::InnerIterator it(g.weights, i); it; ++it)
            adj.emplace_back(it.value(), static_cast<int>(it.col()));
        std::vector<std::pair<double, int>> emb;
        for (int j = 0; j < g.n; ++j)
            if (j != i) emb.emplace_back(S(i, j), j);

        const std::vector<int> ns = top_k_by_value(adj, k);
        const std::vector<int> ne = top_k_by_value(emb, k);
        const std::set<int> set_s(ns.begin(), ns.end());
        const std::set<int> set_e(ne.begin(), ne.end());
        int diff = 0;
        for (const int v : set_s)
            if (!set_e.count(v)) ++diff;
        for (const int v : set_e)
            if (!set_s.count(v)) ++diff;
        scores[i] = diff;
    }
    return scores;
}

RefineResult refine_and_diffuse(const Graph& g, const EmbeddingSet& emb,
                                const std::vector<int>& labels,
                                const std::vector<int>& labeled, const RefineOptions& opts) {
    if (std::abs(opts.alpha1 + opts.alpha2 + opts.alpha3 - 1.0) > 1e-9)
        throw UsageError("combination weights must sum to 1");
    if (static_cast<int>(labels.size()) != g.n)
        throw DataError("label vector length does not match the graph");
    if (emb.Z.rows() != g.n)
        throw DataError("embedding row count does not match the graph");

    RefineResult res;
    const Matrix S_cos = cosine_similarity(emb.Z);

    Matrix combined;
    if (opts.mode == CombineMode::Gat) {
        Matrix att = Matrix::Zero(g.n, g.n);
        if (emb.attention)
            att = Matrix(*emb.attention);
        else if (opts.alpha2 > 0.0)
            throw UsageError("gat combination with alpha2 > 0 needs an attention file");
        combined = combine_similarities(opts.alpha1, S_cos, opts.alpha2, att, opts.alpha3,
                                        Matrix(g.weights));
    } else {
        const SpectralDecomposition spec = eigendecompose(laplacian(g, opts.kind));
        const Matrix H = apply_heat(spec, opts.s, opts.t, Matrix::Identity(g.n, g.n));
        combined = combine_similarities(opts.alpha1, S_cos, opts.alpha2, H, opts.alpha3,
                                        structural_similarity(g));
    }

    int dropped = 0;
    Sparse W = threshold_sparsify(combined, opts.tau, g, &dropped);
    if (dropped > 0)
        res.warnings.push_back("dropped " + std::to_string(dropped) +
                               " non-positive combined weights on original edges");

    res.refined.n = g.n;
    res.refined.weights = std::move(W);
    res.refined.degrees = res.refined.weights * Vector::Ones(g.n);

    res.refined_connected = is_connected(res.refined);
    if (!res.refined_connected)
        res.warnings.push_back(
            "refined graph is disconnected; steady-state checks do not apply");

    int c = 0;
    for (const int y : labels) c = std::max(c, y + 1);
    if (c < 2) throw DataError("need at least two classes to diffuse labels");

    const Matrix U0 = one_hot_initial(labels, labeled, g.n, c);
    const Matrix F = build_source(U0, labeled, opts.source,
                                  opts.source == SourceVariant::DegreeScaled ? &g.degrees
                                                                             : nullptr);

    const SpectralDecomposition spec = eigendecompose(laplacian(res.refined, opts.kind));
    const SpectralOperator op(spec, opts.s);

    SelfTrainOptions st;
    st.theta0 = opts.theta0;
    st.t_max = opts.t_max;
    st.dt = opts.t;  // first exponential step spans the full horizon
    const SelfTrainResult trained = self_train(op, U0, F, labeled, st);
    res.predictions = predict(trained.U);
    return res;
}

} // namespace heatprop
