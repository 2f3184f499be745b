#include "heatprop/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "heatprop/rng.hpp"

namespace heatprop {

TwoMoonData two_moon(const TwoMoonConfig& config) {
    if (config.n < 4) throw UsageError("two-moon needs at least 4 points");
    if (config.n % 2 != 0) throw UsageError("two-moon point count must be even");
    if (config.noise < 0.0) throw UsageError("noise level must be non-negative");
    const int half = config.n / 2;
    if (config.k < 1 || config.k >= config.n) throw UsageError("kNN count out of range");

    TwoMoonData data;
    data.points.resize(config.n, 2);
    data.labels.resize(config.n);

    // Upper arc on the unit circle; lower arc mirrored and shifted by
    // (1, -0.5) so the moons interleave.
    for (int i = 0; i < half; ++i) {
        const double th = half == 1 ? 0.0 : M_PI * i / (half - 1);
        data.points(i, 0) = std::cos(th);
        data.points(i, 1) = std::sin(th);
        data.labels[i] = 0;
        data.points(half + i, 0) = 1.0 - std::cos(th);
        data.points(half + i, 1) = 0.5 - std::sin(th);
        data.labels[half + i] = 1;
    }
    Rng rng(config.seed);
    for (int i = 0; i < config.n; ++i) {
        data.points(i, 0) += config.noise * normal01(rng);
        data.points(i, 1) += config.noise * normal01(rng);
    }

    // kNN with union symmetrization; sigma is the mean distance to the
    // selected neighbors, scaled by the configured factor.
    const int n = config.n;
    std::vector<std::vector<int>> knn(n);
    double dist_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        std::vector<std::pair<double, int>> d2;
        d2.reserve(n - 1);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            d2.emplace_back((data.points.row(i) - data.points.row(j)).squaredNorm(), j);
        }
        std::nth_element(d2.begin(), d2.begin() + config.k, d2.end());
        d2.resize(config.k);
        std::sort(d2.begin(), d2.end());  // deterministic tie order by (d2, index)
        for (const auto& [dd, j] : d2) {
            knn[i].push_back(j);
            dist_sum += std::sqrt(dd);
        }
    }
    const double sigma = config.bandwidth_scale * dist_sum / (static_cast<double>(n) * config.k);
    if (sigma <= 0.0) throw NumericalError("two-moon bandwidth collapsed to zero");

    std::map<std::pair<int, int>, double> weights;
    for (int i = 0; i < n; ++i) {
        for (const int j : knn[i]) {
            const auto key = std::minmax(i, j);
            if (weights.count({key.first, key.second})) continue;
            const double d2 = (data.points.row(i) - data.points.row(j)).squaredNorm();
            weights[{key.first, key.second}] = std::exp(-d2 / (2.0 * sigma * sigma));
        }
    }
    std::vector<Edge> edges;
    edges.reserve(weights.size());
    for (const auto& [key, w] : weights) edges.push_back({key.first, key.second, w});
    data.graph = build_graph(edges, n);
    return data;
}

CoraData load_cora(const std::string& edges_path, const std::string& labels_path) {
    CoraData data;

    std::ifstream lab(labels_path);
    if (!lab) throw DataError("cannot open label file '" + labels_path + "'");
    std::map<int, int> node_label;
    std::string line;
    int lineno = 0;
    int max_node = -1, max_label = -1;
    while (std::getline(lab, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        int node, label;
        if (!(ls >> node >> label))
            throw DataError(labels_path + ":" + std::to_string(lineno) +
                            ": expected 'node label'");
        if (node < 0 || label < 0)
            throw DataError(labels_path + ":" + std::to_string(lineno) + ": negative id");
        if (node_label.count(node))
            throw DataError(labels_path + ":" + std::to_string(lineno) +
                            ": duplicate node " + std::to_string(node));
        node_label[node] = label;
        max_node = std::max(max_node, node);
        max_label = std::max(max_label, label);
    }
    const int n = max_node + 1;
    if (n <= 0) throw DataError("label file '" + labels_path + "' is empty");
    if (static_cast<int>(node_label.size()) != n)
        throw DataError("label file covers " + std::to_string(node_label.size()) +
                        " nodes but ids run to " + std::to_string(n - 1));
    data.labels.resize(n);
    for (const auto& [node, label] : node_label) data.labels[node] = label;
    data.n_classes = max_label + 1;

    std::ifstream edg(edges_path);
    if (!edg) throw DataError("cannot open edge file '" + edges_path + "'");
    std::set<std::pair<int, int>> seen;
    std::vector<Edge> edges;
    lineno = 0;
    int self_loops = 0;
    while (std::getline(edg, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        int i, j;
        if (!(ls >> i >> j))
            throw DataError(edges_path + ":" + std::to_string(lineno) + ": expected 'i j'");
        if (i < 0 || i >= n || j < 0 || j >= n)
            throw DataError(edges_path + ":" + std::to_string(lineno) +
                            ": node id out of range for n=" + std::to_string(n));
        if (i == j) {
            ++self_loops;  // some dataset revisions carry self-citations
            continue;
        }
        const auto key = std::minmax(i, j);
        if (seen.insert({key.first, key.second}).second)
            edges.push_back({key.first, key.second, 1.0});
    }
    if (self_loops > 0)
        data.warnings.push_back("skipped " + std::to_string(self_loops) + " self-citations");
    data.graph = build_graph(edges, n);

    if (n != 2708)
        data.warnings.push_back("node count " + std::to_string(n) + " differs from 2708");
    if (static_cast<int>(edges.size()) != 5278)
        data.warnings.push_back("undirected edge count " + std::to_string(edges.size()) +
                                " differs from 5278");
    if (data.n_classes != 7)
        data.warnings.push_back("class count " + std::to_string(data.n_classes) +
                                " differs from 7");
    return data;
}

Split sample_split(const std::vector<int>& labels, int per_class, std::uint64_t seed,
                   int val_size, int test_size) {
    if (per_class < 1) throw UsageError("labels per class must be at least 1");
    const int n = static_cast<int>(labels.size());
    int n_classes = 0;
    for (const int y : labels) {
        if (y < 0) throw DataError("negative class label");
        n_classes = std::max(n_classes, y + 1);
    }

    Rng rng(seed);
    const std::vector<int> order = shuffled_indices(rng, n);

    std::vector<int> taken_per_class(n_classes, 0);
    std::vector<char> is_labeled(n, 0);
    Split split;
    for (const int i : order) {
        if (taken_per_class[labels[i]] < per_class) {
            ++taken_per_class[labels[i]];
            is_labeled[i] = 1;
            split.labeled.push_back(i);
        }
    }
    for (int cls = 0; cls < n_classes; ++cls)
        if (taken_per_class[cls] < per_class)
            throw DataError("class " + std::to_string(cls) + " has only " +
                            std::to_string(taken_per_class[cls]) + " nodes; cannot draw " +
                            std::to_string(per_class));
    std::sort(split.labeled.begin(), split.labeled.end());

    std::vector<int> remainder;
    for (const int i : order)
        if (!is_labeled[i]) remainder.push_back(i);

    if (val_size == 0 && test_size == 0) {
        split.test = remainder;
        std::sort(split.test.begin(), split.test.end());
        return split;
    }
    if (val_size + test_size > static_cast<int>(remainder.size()))
        throw DataError("validation+test sizes exceed the " +
                        std::to_string(remainder.size()) + " unlabeled nodes");
    split.val.assign(remainder.begin(), remainder.begin() + val_size);
    split.test.assign(remainder.begin() + val_size, remainder.begin() + val_size + test_size);
    std::sort(split.val.begin(), split.val.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

Split sample_split_total(const std::vector<int>& labels, int total, std::uint64_t seed) {
    if (total < 1) throw UsageError("total label budget must be at least 1");
    const int n = static_cast<int>(labels.size());
    if (total > n) throw DataError("label budget exceeds the node count");
    Rng rng(seed);
    const std::vector<int> order = shuffled_indices(rng, n);
    Split split;
    split.labeled.assign(order.begin(), order.begin() + total);
    std::sort(split.labeled.begin(), split.labeled.end());
    split.test.assign(order.begin() + total, order.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth,
                const std::vector<int>& mask) {
    if (mask.empty()) throw UsageError("accuracy over an empty mask is undefined");
    int correct = 0;
    for (const int i : mask) {
        if (i < 0 || i >= static_cast<int>(pred.size()) || i >= static_cast<int>(truth.size()))
            throw UsageError("mask index out of range");
        if (pred[i] == truth[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(mask.size());
}

} // namespace heatprop
