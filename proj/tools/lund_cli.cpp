// Experiment harness: dataset synthesis, single clustering runs, (sigma, t)
// sweeps with trial averaging, and near-reducibility diagnostics.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lund/errors.hpp"
#include "lund/evaluation.hpp"
#include "lund/point_cloud.hpp"
#include "lund/svg.hpp"
#include "lund/sweep.hpp"
#include "lund/synth.hpp"

namespace {

using nlohmann::json;

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

std::vector<std::uint64_t> parse_t_list(const std::string& csv) {
    std::vector<std::uint64_t> out;
    for (double v : parse_double_list(csv)) {
        if (v < 0.0 || v > 9.3e18 || std::llround(v) < 0)
            throw lund::InvalidParameterError("t out of range: " + csv);
        out.push_back(static_cast<std::uint64_t>(std::llround(v)));
    }
    return out;
}

std::string family_name(lund::DatasetSpec::Family f) {
    using F = lund::DatasetSpec::Family;
    switch (f) {
        case F::bottleneck: return "bottleneck";
        case F::nonlinear_circles: return "nonlinear_circles";
        case F::nadler_gaussians: return "nadler_gaussians";
        case F::gaussian_pair: return "gaussian_pair";
        case F::custom_mixture: return "custom_mixture";
    }
    return "?";
}

lund::DatasetSpec spec_by_name(const std::string& name) {
    const auto specs = lund::default_specs();
    const auto it = specs.find(name);
    if (it != specs.end()) return it->second;
    std::string known;
    for (const auto& [k, v] : specs) known += (known.empty() ? "" : ", ") + k;
    throw lund::InvalidParameterError("unknown dataset '" + name + "' (known: " +
                                      known + ")");
}

json spec_to_json(const lund::DatasetSpec& s) {
    json j;
    j["family"] = family_name(s.family);
    j["n"] = s.n;
    j["seed"] = s.seed;
    j["k"] = s.k();
    if (!s.weights.empty()) j["weights"] = s.weights;
    using F = lund::DatasetSpec::Family;
    if (s.family == F::gaussian_pair) j["pair_scale"] = s.pair_scale;
    if (s.family == F::bottleneck) {
        j["bn_blob_std"] = s.bn_blob_std;
        j["bn_bar_len"] = s.bn_bar_len;
        j["bn_bridge_frac"] = s.bn_bridge_frac;
        j["bn_bridge_std"] = s.bn_bridge_std;
        j["bn_gap"] = s.bn_gap;
        j["bn_trunc"] = s.bn_trunc;
    }
    if (s.family == F::nonlinear_circles) {
        j["nc_disk_r"] = s.nc_disk_r;
        j["nc_radii"] = s.nc_radii;
        j["nc_radial_std"] = s.nc_radial_std;
        j["nc_bump_frac"] = s.nc_bump_frac;
        j["nc_bump_std"] = s.nc_bump_std;
    }
    if (s.family == F::custom_mixture || s.family == F::nadler_gaussians) {
        json means = json::array(), covs = json::array();
        for (const auto& m : s.means)
            means.push_back(std::vector<double>(m.data(), m.data() + m.size()));
        for (const auto& c : s.covs) {
            json rows = json::array();
            for (Eigen::Index r = 0; r < c.rows(); ++r)
                rows.push_back(std::vector<double>(c.row(r).begin(), c.row(r).end()));
            covs.push_back(rows);
        }
        if (!means.empty()) j["means"] = means;
        if (!covs.empty()) j["covs"] = covs;
    }
    return j;
}

void spec_from_json(const json& j, lund::DatasetSpec& s) {
    if (j.contains("name")) s = spec_by_name(j.at("name").get<std::string>());
    if (j.contains("family")) {
        const std::string f = j.at("family").get<std::string>();
        using F = lund::DatasetSpec::Family;
        if (f == "bottleneck") s.family = F::bottleneck;
        else if (f == "nonlinear_circles") s.family = F::nonlinear_circles;
        else if (f == "nadler_gaussians") s.family = F::nadler_gaussians;
        else if (f == "gaussian_pair") s.family = F::gaussian_pair;
        else if (f == "custom_mixture") s.family = F::custom_mixture;
        else throw lund::InvalidParameterError("unknown family: " + f);
    }
    if (j.contains("n")) s.n = j.at("n").get<std::size_t>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("weights")) s.weights = j.at("weights").get<std::vector<double>>();
    if (j.contains("pair_scale")) s.pair_scale = j.at("pair_scale").get<double>();
    if (j.contains("bn_blob_std")) s.bn_blob_std = j.at("bn_blob_std").get<double>();
    if (j.contains("bn_bar_len")) s.bn_bar_len = j.at("bn_bar_len").get<double>();
    if (j.contains("bn_bridge_frac"))
        s.bn_bridge_frac = j.at("bn_bridge_frac").get<double>();
    if (j.contains("bn_bridge_std"))
        s.bn_bridge_std = j.at("bn_bridge_std").get<double>();
    if (j.contains("bn_gap")) s.bn_gap = j.at("bn_gap").get<double>();
    if (j.contains("bn_trunc")) s.bn_trunc = j.at("bn_trunc").get<double>();
    if (j.contains("nc_disk_r")) s.nc_disk_r = j.at("nc_disk_r").get<double>();
    if (j.contains("nc_radii")) {
        const auto r = j.at("nc_radii").get<std::vector<double>>();
        if (r.size() != 2)
            throw lund::InvalidParameterError("nc_radii needs two entries");
        s.nc_radii = {r[0], r[1]};
    }
    if (j.contains("nc_radial_std"))
        s.nc_radial_std = j.at("nc_radial_std").get<double>();
    if (j.contains("nc_bump_frac")) s.nc_bump_frac = j.at("nc_bump_frac").get<double>();
    if (j.contains("nc_bump_std")) s.nc_bump_std = j.at("nc_bump_std").get<double>();
    if (j.contains("means")) {
        s.means.clear();
        for (const auto& row : j.at("means")) {
            const auto v = row.get<std::vector<double>>();
            s.means.push_back(
                Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size())));
        }
    }
    if (j.contains("covs")) {
        s.covs.clear();
        for (const auto& mat : j.at("covs")) {
            const std::size_t r = mat.size();
            Eigen::MatrixXd c(r, r);
            for (std::size_t i = 0; i < r; ++i) {
                const auto row = mat[i].get<std::vector<double>>();
                if (row.size() != r)
                    throw lund::InvalidParameterError("covariance must be square");
                for (std::size_t jj = 0; jj < r; ++jj)
                    c(static_cast<long>(i), static_cast<long>(jj)) = row[jj];
            }
            s.covs.push_back(c);
        }
    }
}

void config_from_json(const json& j, lund::ExperimentConfig& c) {
    if (j.contains("dataset")) spec_from_json(j.at("dataset"), c.dataset);
    if (j.contains("input")) c.input_path = j.at("input").get<std::string>();
    if (j.contains("sigma_grid"))
        c.sigma_grid = j.at("sigma_grid").get<std::vector<double>>();
    if (j.contains("t_grid"))
        c.t_grid = j.at("t_grid").get<std::vector<std::uint64_t>>();
    if (j.contains("trials")) c.trials = j.at("trials").get<std::size_t>();
    if (j.contains("seed")) c.base_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("methods")) {
        c.methods.clear();
        for (const auto& m : j.at("methods"))
            c.methods.push_back(lund::method_from_name(m.get<std::string>()));
    }
    if (j.contains("k_mode")) {
        const std::string m = j.at("k_mode").get<std::string>();
        if (m == "fixed") c.k_fixed = true;
        else if (m == "estimate") c.k_fixed = false;
        else throw lund::InvalidParameterError("k_mode must be estimate or fixed");
    }
    if (j.contains("k")) c.k = j.at("k").get<std::size_t>();
    if (j.contains("tau")) c.tau = j.at("tau").get<double>();
    if (j.contains("knn")) c.graph_knn = j.at("knn").get<std::size_t>();
    if (j.contains("kde_knn")) c.kde_knn = j.at("kde_knn").get<std::size_t>();
    if (j.contains("kde_sigma")) c.kde_sigma = j.at("kde_sigma").get<double>();
    if (j.contains("eigs")) c.eigs = j.at("eigs").get<std::size_t>();
    if (j.contains("eigengap")) c.eigengap_row = j.at("eigengap").get<bool>();
    if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
}

json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw lund::IoError("cannot open config: " + path);
    json j;
    f >> j;
    return j;
}

std::string sidecar_path(const std::string& csv_path) {
    const auto dot = csv_path.rfind('.');
    if (dot == std::string::npos) return csv_path + ".json";
    return csv_path.substr(0, dot) + ".json";
}

struct CommonFlags {
    std::string config_path;
    std::string input;
    std::string dataset;
    std::size_t n = 0;
    double sigma = 0.0;
    std::string sigma_grid;
    double t = -1.0;
    std::string t_grid;
    std::size_t trials = 0;
    long long seed = -1;
    std::vector<std::string> methods;
    std::size_t k = 0;
    std::string k_mode;
    long long knn = -1;
    long long eigs = -1;
    long long kde_knn = -1;
    double kde_sigma = -1.0;
    double tau = -1.0;
    std::string out = ".";
    std::size_t subsample = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool gridded) {
    cmd->add_option("--config", f.config_path, "JSON config file (flags override)");
    cmd->add_option("--input", f.input, "input points CSV");
    cmd->add_option("--dataset", f.dataset, "named synthetic dataset");
    cmd->add_option("--n", f.n, "points to generate");
    cmd->add_option("--sigma", f.sigma, "kernel bandwidth");
    cmd->add_option("--t", f.t, "diffusion time");
    if (gridded) {
        cmd->add_option("--sigma-grid", f.sigma_grid, "comma-separated bandwidths");
        cmd->add_option("--t-grid", f.t_grid, "comma-separated times");
        cmd->add_option("--trials", f.trials, "trials per cell");
    }
    cmd->add_option("--seed", f.seed, "base seed");
    cmd->add_option("--method", f.methods,
                    "lund | spectral_shi | spectral_ng | fsfdpc | kmeans");
    cmd->add_option("--k", f.k, "cluster count for fixed-k methods");
    cmd->add_option("--k-mode", f.k_mode, "estimate | fixed");
    cmd->add_option("--knn", f.knn, "kernel graph neighbors (0 = dense)");
    cmd->add_option("--eigs", f.eigs, "eigenpairs kept");
    cmd->add_option("--kde-knn", f.kde_knn, "density estimate neighbors");
    cmd->add_option("--kde-sigma", f.kde_sigma, "density bandwidth (0 = sigma)");
    cmd->add_option("--tau", f.tau, "score-ratio threshold for model order");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--subsample", f.subsample, "diagnostic row subsample (0 = auto)");
}

lund::ExperimentConfig build_config(const CommonFlags& f) {
    lund::ExperimentConfig c;
    if (!f.config_path.empty()) config_from_json(load_json_file(f.config_path), c);
    if (!f.input.empty()) c.input_path = f.input;
    if (!f.dataset.empty()) c.dataset = spec_by_name(f.dataset);
    if (f.n > 0) c.dataset.n = f.n;
    if (!f.sigma_grid.empty()) c.sigma_grid = parse_double_list(f.sigma_grid);
    if (f.sigma > 0.0) c.sigma_grid = {f.sigma};
    if (!f.t_grid.empty()) c.t_grid = parse_t_list(f.t_grid);
    if (f.t >= 0.0)
        c.t_grid = {static_cast<std::uint64_t>(std::llround(f.t))};
    if (f.trials > 0) c.trials = f.trials;
    if (f.seed >= 0) c.base_seed = static_cast<std::uint64_t>(f.seed);
    if (!f.methods.empty()) {
        c.methods.clear();
        for (const auto& m : f.methods) c.methods.push_back(lund::method_from_name(m));
    }
    if (f.k > 0) c.k = f.k;
    if (!f.k_mode.empty()) {
        if (f.k_mode == "fixed") c.k_fixed = true;
        else if (f.k_mode == "estimate") c.k_fixed = false;
        else throw lund::InvalidParameterError("k_mode must be estimate or fixed");
    }
    if (f.knn >= 0) c.graph_knn = static_cast<std::size_t>(f.knn);
    if (f.eigs >= 0) c.eigs = static_cast<std::size_t>(f.eigs);
    if (f.kde_knn >= 0) c.kde_knn = static_cast<std::size_t>(f.kde_knn);
    if (f.kde_sigma >= 0.0) c.kde_sigma = f.kde_sigma;
    if (f.tau >= 0.0) c.tau = f.tau;
    if (!f.out.empty()) c.out_dir = f.out;
    lund::fill_default_grids(c);
    return c;
}

lund::PointCloud materialize(const lund::ExperimentConfig& c) {
    if (!c.input_path.empty()) return lund::read_points_csv(c.input_path);
    lund::DatasetSpec spec = c.dataset;
    spec.seed = c.base_seed > 0 ? c.base_seed : spec.seed;
    return lund::generate(spec);
}

int cmd_synth(const CommonFlags& f, const std::string& out_file) {
    lund::DatasetSpec spec =
        f.dataset.empty() ? lund::DatasetSpec{} : spec_by_name(f.dataset);
    if (!f.config_path.empty()) {
        const json j = load_json_file(f.config_path);
        if (j.contains("dataset")) spec_from_json(j.at("dataset"), spec);
    }
    if (f.n > 0) spec.n = f.n;
    if (f.seed >= 0) spec.seed = static_cast<std::uint64_t>(f.seed);
    const lund::PointCloud cloud = lund::generate(spec);
    lund::write_points_csv(cloud, out_file);
    lund::write_text_file(sidecar_path(out_file), spec_to_json(spec).dump(2) + "\n");
    std::cout << "wrote " << cloud.n << " points (" << spec.k() << " classes) to "
              << out_file << "\n";
    return 0;
}

int cmd_cluster(const CommonFlags& f) {
    const lund::ExperimentConfig c = build_config(f);
    const lund::PointCloud cloud = materialize(c);
    const lund::Method method =
        f.methods.empty() ? lund::Method::lund : lund::method_from_name(f.methods[0]);
    const double sigma = c.sigma_grid.front();
    const std::uint64_t t = c.t_grid.front();

    const lund::ClusterRun run = lund::run_cluster(cloud, method, c, sigma, t);

    std::filesystem::create_directories(c.out_dir);
    std::ostringstream csv;
    csv << (cloud.has_labels() ? "index,label,truth\n" : "index,label\n");
    for (std::size_t i = 0; i < run.labels.size(); ++i) {
        csv << i << "," << run.labels[i];
        if (cloud.has_labels()) csv << "," << cloud.labels[i];
        csv << "\n";
    }
    lund::write_text_file(c.out_dir + "/labels.csv", csv.str());

    json rep;
    rep["method"] = run.method;
    rep["sigma"] = sigma;
    rep["t"] = t;
    rep["k"] = run.k_used;
    rep["seconds"] = run.seconds;
    if (!run.modes.empty()) rep["modes"] = run.modes;
    if (cloud.has_labels()) {
        rep["overall_accuracy"] = run.overall;
        rep["average_accuracy"] = run.average;
    }
    lund::write_text_file(c.out_dir + "/report.json", rep.dump(2) + "\n");
    std::cout << run.method << ": k = " << run.k_used;
    if (cloud.has_labels()) std::cout << ", overall accuracy = " << run.overall;
    std::cout << " (" << run.seconds << " s)\n";
    return 0;
}

int cmd_sweep(const CommonFlags& f) {
    lund::ExperimentConfig c = build_config(f);
    std::filesystem::create_directories(c.out_dir);
    const lund::SweepResult result = lund::run_sweep(c);
    lund::write_sweep_outputs(result, c.out_dir);
    std::cout << "sweep: " << result.methods.size() << " methods x "
              << result.sigma_grid.size() << " sigma x " << result.t_grid.size()
              << " t, " << result.trials << " trials -> " << c.out_dir << "\n";
    return 0;
}

int cmd_diagnose(const CommonFlags& f) {
    const lund::ExperimentConfig c = build_config(f);
    const lund::PointCloud cloud = materialize(c);
    std::filesystem::create_directories(c.out_dir);
    for (double sigma : c.sigma_grid) {
        const lund::DiagnoseResult d =
            lund::run_diagnose(cloud, sigma, c.t_grid, c.graph_knn, f.subsample);
        lund::write_diagnose_outputs(d, c.out_dir);
        const auto w = d.report.time_window(0.1);
        std::cout << "sigma = " << sigma << ": delta = " << d.report.delta
                  << ", 1 - lambda_(K+1) = " << 1.0 - d.report.lambda_k1
                  << ", kappa = " << d.report.kappa << ", window(0.1) = ["
                  << w.first << ", " << w.second << "]\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diffusion-based clustering experiments"};
    app.require_subcommand(1);

    CommonFlags synth_f, cluster_f, sweep_f, diag_f;
    std::string synth_out = "points.csv";

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    add_common(synth, synth_f, false);
    synth->add_option("--out-file", synth_out, "output CSV path");

    CLI::App* cluster = app.add_subcommand("cluster", "one clustering run");
    add_common(cluster, cluster_f, false);

    CLI::App* sweep = app.add_subcommand("sweep", "(sigma, t) grid experiment");
    add_common(sweep, sweep_f, true);

    CLI::App* diagnose =
        app.add_subcommand("diagnose", "near-reducibility diagnostics");
    add_common(diagnose, diag_f, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            // --out doubles as the CSV path when --out-file was not given
            const std::string path =
                synth->count("--out-file") ? synth_out
                : synth->count("--out")    ? synth_f.out
                                           : synth_out;
            return cmd_synth(synth_f, path);
        }
        if (cluster->parsed()) return cmd_cluster(cluster_f);
        if (sweep->parsed()) return cmd_sweep(sweep_f);
        if (diagnose->parsed()) return cmd_diagnose(diag_f);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
