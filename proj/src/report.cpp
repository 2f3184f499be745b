#include "heatprop/report.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace heatprop {

namespace {

Json config_json(const ExperimentConfig& cfg) {
    Json j;
    j["dataset"] = cfg.dataset;
    j["laplacian"] = laplacian_kind_name(cfg.kind);
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["val_size"] = cfg.val_size;
    j["test_size"] = cfg.test_size;
    if (cfg.dataset == "twomoon") {
        j["n"] = cfg.twomoon.n;
        j["noise"] = cfg.twomoon.noise;
        j["knn"] = cfg.twomoon.k;
        j["bandwidth_scale"] = cfg.twomoon.bandwidth_scale;
    } else {
        j["edges"] = cfg.cora_edges;
        j["labels"] = cfg.cora_labels;
    }
    j["s_values"] = cfg.s_values;
    if (cfg.labels_total > 0)
        j["labels_total"] = cfg.labels_total;
    else
        j["labels_per_class"] = cfg.labels_per_class;
    j["schemes"] = cfg.schemes;
    Json tmap = Json::object();
    for (const auto& [s, ts] : cfg.t_by_s) {
        char key[32];
        std::snprintf(key, sizeof key, "%g", s);
        tmap[key] = ts;
    }
    j["t_by_s"] = tmap;
    return j;
}

} // namespace

ExperimentConfig config_from_json(const Json& j) {
    ExperimentConfig cfg;
    try {
        if (j.contains("dataset")) cfg.dataset = j["dataset"].get<std::string>();
        if (j.contains("laplacian"))
            cfg.kind = parse_laplacian_kind(j["laplacian"].get<std::string>());
        if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
        if (j.contains("val_size")) cfg.val_size = j["val_size"].get<int>();
        if (j.contains("test_size")) cfg.test_size = j["test_size"].get<int>();
        if (j.contains("n")) cfg.twomoon.n = j["n"].get<int>();
        if (j.contains("noise")) cfg.twomoon.noise = j["noise"].get<double>();
        if (j.contains("knn")) cfg.twomoon.k = j["knn"].get<int>();
        if (j.contains("bandwidth_scale"))
            cfg.twomoon.bandwidth_scale = j["bandwidth_scale"].get<double>();
        if (j.contains("edges")) cfg.cora_edges = j["edges"].get<std::string>();
        if (j.contains("labels")) cfg.cora_labels = j["labels"].get<std::string>();
        if (j.contains("s_values")) cfg.s_values = j["s_values"].get<std::vector<double>>();
        if (j.contains("labels_per_class"))
            cfg.labels_per_class = j["labels_per_class"].get<std::vector<int>>();
        if (j.contains("labels_total")) cfg.labels_total = j["labels_total"].get<int>();
        if (j.contains("schemes")) cfg.schemes = j["schemes"].get<std::vector<int>>();
        if (j.contains("t_by_s")) {
            cfg.t_by_s.clear();
            for (const auto& [key, val] : j["t_by_s"].items())
                cfg.t_by_s[std::stod(key)] = val.get<std::vector<double>>();
        }
    } catch (const Json::exception& e) {
        throw DataError(std::string("bad config field: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw DataError("t_by_s keys must be numeric");
    }
    return cfg;
}

Json report_document(const BenchResult& result) {
    Json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["kind"] = "bench";
    doc["config"] = config_json(result.config);

    Json meta;
    meta["labels_interpretation"] =
        result.config.labels_total > 0 ? "total budget" : "per class";
    if (result.config.dataset == "twomoon")
        meta["graph_construction"] =
            "kNN union graph, gaussian weights, sigma = bandwidth_scale * mean kNN distance";
    bool multi_t = false;
    for (const auto& [s, ts] : result.config.t_by_s) multi_t |= ts.size() > 1;
    if (multi_t) meta["time_selection"] = "per trial, best validation accuracy";
    if (!result.stats.empty()) meta["posthoc"] = kPosthocNote;
    doc["metadata"] = meta;

    doc["rows"] = Json::array();
    for (const CellResult& cell : result.cells) {
        Json row;
        row["s"] = cell.s;
        row["labels"] = cell.labels;
        row["scheme"] = cell.scheme;
        row["t_candidates"] = cell.t_candidates;
        row["trials"] = cell.stats.n_trials;
        row["mean"] = cell.stats.mean;
        row["se"] = cell.stats.se;
        row["se_degenerate"] = cell.stats.se_degenerate;
        row["accuracies"] = cell.accuracies;
        row["t_chosen"] = cell.t_chosen;
        doc["rows"].push_back(std::move(row));
    }

    doc["stats"] = Json::array();
    for (const CellStats& cs : result.stats) {
        Json s;
        s["s"] = cs.s;
        s["labels"] = cs.labels;
        s["anova_F"] = cs.anova.F;
        s["anova_p"] = cs.anova.p;
        s["df_between"] = cs.anova.df_between;
        s["df_within"] = cs.anova.df_within;
        s["posthoc"] = kPosthocNote;
        s["pairwise"] = Json::array();
        for (const PairwiseComparison& cmp : cs.pairwise) {
            Json pj;
            pj["scheme_a"] = result.config.schemes[cmp.i];
            pj["scheme_b"] = result.config.schemes[cmp.j];
            pj["mean_diff"] = cmp.mean_diff;
            pj["t"] = cmp.t;
            pj["p_raw"] = cmp.p_raw;
            pj["p_adjusted"] = cmp.p_adjusted;
            s["pairwise"].push_back(std::move(pj));
        }
        doc["stats"].push_back(std::move(s));
    }
    return doc;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    Json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw DataError("cannot parse '" + path + "': " + e.what());
    }
    return doc;
}

Json read_report(const std::string& path) {
    Json doc = read_json_file(path);
    if (!doc.contains("schema_version") || doc["schema_version"].get<int>() != kReportSchemaVersion)
        throw DataError("report '" + path + "' has an unsupported schema version");
    return doc;
}

void write_report(const Json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write report '" + path + "'");
    out << doc.dump(2) << "\n";
}

std::string render_table(const BenchResult& result) {
    std::set<std::pair<double, int>> keys;
    for (const CellResult& cell : result.cells) keys.insert({cell.s, cell.labels});

    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-8s %-8s", "s", "labels");
    out << buf;
    for (const int scheme : result.config.schemes) {
        std::snprintf(buf, sizeof buf, "  scheme %d (mean +/- SE) ", scheme);
        out << buf;
    }
    out << "\n";
    for (const auto& [s, labels] : keys) {
        std::snprintf(buf, sizeof buf, "%-8.3g %-8d", s, labels);
        out << buf;
        for (const int scheme : result.config.schemes) {
            for (const CellResult& cell : result.cells) {
                if (cell.s != s || cell.labels != labels || cell.scheme != scheme) continue;
                std::snprintf(buf, sizeof buf, "  %7.4f +/- %-10.4f", cell.stats.mean,
                              cell.stats.se);
                out << buf;
            }
        }
        out << "\n";
    }
    return out.str();
}

std::string render_stats(const BenchResult& result) {
    std::ostringstream out;
    char buf[200];
    for (const CellStats& cs : result.stats) {
        std::snprintf(buf, sizeof buf, "s=%-6.3g labels=%-4d ANOVA F(%d,%d)=%.4f p=%.4f\n",
                      cs.s, cs.labels, cs.anova.df_between, cs.anova.df_within, cs.anova.F,
                      cs.anova.p);
        out << buf;
        for (const PairwiseComparison& cmp : cs.pairwise) {
            std::snprintf(buf, sizeof buf,
                          "    scheme %d vs %d: mean diff %+0.4f, t=%+0.3f, p=%.4f "
                          "(adjusted %.4f)\n",
                          result.config.schemes[cmp.i], result.config.schemes[cmp.j],
                          cmp.mean_diff, cmp.t, cmp.p_raw, cmp.p_adjusted);
            out << buf;
        }
        out << "    " << kPosthocNote << "\n";
    }
    return out.str();
}

} // namespace heatprop
