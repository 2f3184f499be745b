// Graph refinement from external embeddings: similarity combination,
// threshold sparsification, neighborhood anomaly scores, and re-diffusion on
// the refined graph.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "heatprop/selftrain.hpp"

namespace heatprop {

struct EmbeddingSet {
    Matrix Z;                       // n x d, no all-zero rows
    std::optional<Sparse> attention;  // averaged attention weights in [0,1]
};

EmbeddingSet load_embeddings(const std::string& csv_path,
                             const std::string& attention_path = "", int n_hint = -1);

// Entries in [-1,1], unit diagonal. Rejects zero rows.
Matrix cosine_similarity(const Matrix& Z);

// exp(-||z_i - z_j||^2 / (2 sigma^2)). sigma <= 0 selects the automatic
// bandwidth: median pairwise distance over a 1000-pair seeded sample.
Matrix gaussian_embedding_similarity(const Matrix& Z, double sigma = 0.0);

// Unweighted hop counts from every node (breadth-first); unreachable pairs
// get -1.
std::vector<std::vector<int>> hop_distances(const Graph& g);

// exp(-hops); unreachable pairs get similarity 0.
Matrix structural_similarity(const Graph& g);

// w1*S1 + w2*S2 + w3*S3 with non-negative weights.
Matrix combine_similarities(double w1, const Matrix& S1, double w2, const Matrix& S2, double w3,
                            const Matrix& S3);

// Keeps M_ij iff M_ij > epsilon or (i,j) is an original edge; original edges
// survive with their combined value. Non-positive surviving values cannot be
// graph weights and are dropped (counted in the returned warning total).
Sparse threshold_sparsify(const Matrix& M, double epsilon, const Graph& original,
                          int* dropped_nonpositive = nullptr);

// |N_struct(i) symmetric-difference N_embed(i)| with both neighborhoods of
// size at most k; ties resolve by node index.
std::vector<int> anomaly_scores(const Graph& g, const Matrix& Z, int k);

enum class CombineMode { Gat, Similarity };

struct RefineOptions {
    double alpha1 = 0.4, alpha2 = 0.3, alpha3 = 0.3;  // must sum to 1
    double tau = 0.0;
    double s = 1.0;
    double t = 1.0;
    CombineMode mode = CombineMode::Similarity;
    LaplacianKind kind = LaplacianKind::Combinatorial;
    double sigma = 0.0;  // gaussian bandwidth, <= 0 for automatic
    SourceVariant source = SourceVariant::Plain;
    // Self-training refinement loop after the first full-length step.
    double theta0 = 0.4;
    int t_max = 1;  // 1 = plain closed-form solve, no pseudo-labeling
};

struct RefineResult {
    Graph refined;
    std::vector<int> predictions;
    std::vector<std::string> warnings;
    bool refined_connected = true;
};

// Phases 2-3: combine similarities, sparsify, rebuild the Laplacian, then
// diffuse with self-training on the refined graph. The first exponential
// step spans the full time t, so t_max = 1 reproduces the closed form.
RefineResult refine_and_diffuse(const Graph& g, const EmbeddingSet& emb,
                                const std::vector<int>& labels,
                                const std::vector<int>& labeled, const RefineOptions& opts);

} // namespace heatprop
