#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lund/diagnostics.hpp"
#include "lund/point_cloud.hpp"
#include "lund/synth.hpp"

namespace lund {

enum class Method { lund, spectral_shi, spectral_ng, fsfdpc, kmeans };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

// One experiment: a dataset source, parameter grids, trial count, methods.
// Everything downstream is deterministic in this struct's values.
struct ExperimentConfig {
    DatasetSpec dataset;     // regenerated per trial with seed base_seed + trial
    std::string input_path;  // nonempty: fixed CSV cloud instead of a generator

    std::vector<double> sigma_grid;      // default 0.05 .. 0.50 step 0.05
    std::vector<std::uint64_t> t_grid;   // default 10^0 .. 10^16
    std::size_t trials = 100;
    std::uint64_t base_seed = 1;
    std::vector<Method> methods{Method::lund};

    bool k_fixed = false;  // clustering methods take k instead of estimating
    std::size_t k = 0;     // 0: use the dataset's true component count
    double tau = 0.0;      // > 0: threshold rule for model order, else argmax

    std::size_t graph_knn = 0;  // 0 = dense kernel graph
    std::size_t kde_knn = 100;
    double kde_sigma = 0.0;  // 0 = reuse the graph sigma
    std::size_t eigs = 100;

    bool eigengap_row = true;  // also record the Laplacian eigengap model order
    std::string out_dir = ".";

    void validate() const;
};

void fill_default_grids(ExperimentConfig& config);

// Trial-aggregated numbers for one (method, sigma, t) cell. Failed trials
// contribute nothing to the means and are counted in `failures`.
struct SweepCell {
    double mean_overall = std::numeric_limits<double>::quiet_NaN();
    double mean_average = std::numeric_limits<double>::quiet_NaN();
    int modal_khat = 0;
    int khat_sign = 0;  // sign(modal_khat - true K), 0 when K unknown
    std::size_t completed = 0;
    std::size_t failures = 0;
};

struct SweepResult {
    std::vector<Method> methods;
    std::vector<double> sigma_grid;
    std::vector<std::uint64_t> t_grid;
    std::size_t trials = 0;
    std::size_t true_k = 0;  // 0 when the input carries no ground truth
    std::vector<SweepCell> cells;  // method-major, then sigma, then t
    std::vector<int> eigengap_khat;  // modal per sigma; empty when disabled

    const SweepCell& at(std::size_t mi, std::size_t si, std::size_t ti) const {
        return cells[(mi * sigma_grid.size() + si) * t_grid.size() + ti];
    }
    SweepCell& at(std::size_t mi, std::size_t si, std::size_t ti) {
        return cells[(mi * sigma_grid.size() + si) * t_grid.size() + ti];
    }
};

SweepResult run_sweep(const ExperimentConfig& config);

// results.csv, khat.csv, and per-method SVG heatmaps under out_dir.
void write_sweep_outputs(const SweepResult& result, const std::string& out_dir);

// Near-reducibility diagnostics on one cloud: the complement report plus the
// global-equilibration curve lambda_2^t / pi_min. Blocks come from the
// cloud's ground-truth labels.
struct DiagnoseResult {
    double sigma = 0.0;
    MesoscopicReport report;
    double lambda2 = 0.0;
    double pi_min = 0.0;
};

DiagnoseResult run_diagnose(const PointCloud& cloud, double sigma,
                            const std::vector<std::uint64_t>& t_grid,
                            std::size_t graph_knn = 0, std::size_t subsample = 0);

// diag_<sigma>.json / .csv plus bound and distance curve SVGs.
void write_diagnose_outputs(const DiagnoseResult& diag, const std::string& out_dir);

// One clustering run; accuracy fields are NaN when the cloud has no labels.
struct ClusterRun {
    std::vector<int> labels;
    std::size_t k_used = 0;
    std::vector<std::uint32_t> modes;  // lund / fsfdpc only
    std::string method;
    double seconds = 0.0;
    double overall = std::numeric_limits<double>::quiet_NaN();
    double average = std::numeric_limits<double>::quiet_NaN();
};

ClusterRun run_cluster(const PointCloud& cloud, Method method,
                       const ExperimentConfig& config, double sigma, std::uint64_t t);

}  // namespace lund
