#include "lund/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lund/baselines.hpp"
#include "lund/errors.hpp"
#include "lund/evaluation.hpp"
#include "lund/lund_core.hpp"
#include "lund/markov.hpp"
#include "lund/neighbors.hpp"
#include "lund/svg.hpp"
#include "lund/thread_pool.hpp"

namespace lund {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string fmt_sigma(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::size_t distinct_labels(const std::vector<int>& labels) {
    return std::set<int>(labels.begin(), labels.end()).size();
}

LundConfig make_lund_config(const ExperimentConfig& config, std::size_t fixed_k) {
    LundConfig lc;
    lc.m = config.eigs;
    if (config.k_fixed) {
        lc.estimator = LundConfig::KEstimator::fixed;
        lc.k_fixed = fixed_k;
    } else if (config.tau > 0.0) {
        lc.estimator = LundConfig::KEstimator::tau_threshold;
        lc.tau = config.tau;
    } else {
        lc.estimator = LundConfig::KEstimator::ratio_argmax;
    }
    return lc;
}

KernelGraph build_graph(const PointCloud& cloud, double sigma, std::size_t graph_knn) {
    if (graph_knn > 0) {
        const NeighborList nl = knn(cloud, graph_knn);
        return build_kernel(cloud, sigma, nl);
    }
    return build_kernel(cloud, sigma);
}

DensityEstimate make_density(const PointCloud& cloud, double sigma,
                             const ExperimentConfig& config) {
    const std::size_t kde_k = std::min(config.kde_knn, cloud.n - 1);
    const NeighborList nl = knn(cloud, kde_k);
    return kde(cloud, nl, config.kde_sigma > 0.0 ? config.kde_sigma : sigma);
}

// per-trial raw numbers before aggregation
struct TrialSlot {
    double overall = kNaN;
    double average = kNaN;
    int khat = 0;
    bool ok = false;
};

int modal_value(const std::vector<int>& values) {
    std::map<int, std::size_t> counts;
    for (int v : values) ++counts[v];
    int best = 0;
    std::size_t best_n = 0;
    for (const auto& [v, c] : counts)
        if (c > best_n) {  // map order makes ties resolve to the smallest value
            best = v;
            best_n = c;
        }
    return best;
}

int quantize_khat(int khat, std::size_t true_k) {
    if (true_k == 0) return 0;
    if (khat == static_cast<int>(true_k)) return 0;
    return khat < static_cast<int>(true_k) ? -1 : 1;
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::lund: return "lund";
        case Method::spectral_shi: return "spectral_shi";
        case Method::spectral_ng: return "spectral_ng";
        case Method::fsfdpc: return "fsfdpc";
        case Method::kmeans: return "kmeans";
    }
    throw InvalidParameterError("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
    if (name == "lund") return Method::lund;
    if (name == "spectral_shi") return Method::spectral_shi;
    if (name == "spectral_ng") return Method::spectral_ng;
    if (name == "fsfdpc") return Method::fsfdpc;
    if (name == "kmeans") return Method::kmeans;
    throw InvalidParameterError("unknown method: " + name);
}

void ExperimentConfig::validate() const {
    if (sigma_grid.empty()) throw InvalidParameterError("config: empty sigma grid");
    for (double s : sigma_grid)
        if (!(s > 0.0)) throw InvalidParameterError("config: sigma must be positive");
    if (t_grid.empty()) throw InvalidParameterError("config: empty t grid");
    if (trials < 1) throw InvalidParameterError("config: trials must be >= 1");
    if (methods.empty()) throw InvalidParameterError("config: no methods");
    if (eigs < 2) throw InvalidParameterError("config: need at least 2 eigenpairs");
    if (kde_knn < 1) throw InvalidParameterError("config: kde_knn must be >= 1");
    if (tau < 0.0) throw InvalidParameterError("config: tau must be nonnegative");
}

void fill_default_grids(ExperimentConfig& config) {
    if (config.sigma_grid.empty())
        for (int i = 1; i <= 10; ++i)
            config.sigma_grid.push_back(0.05 * static_cast<double>(i));
    if (config.t_grid.empty()) {
        std::uint64_t t = 1;
        for (int e = 0; e <= 16; ++e, t *= 10) config.t_grid.push_back(t);
    }
}

SweepResult run_sweep(const ExperimentConfig& config) {
    config.validate();

    PointCloud file_cloud;
    const bool from_file = !config.input_path.empty();
    if (from_file) file_cloud = read_points_csv(config.input_path);

    SweepResult result;
    result.methods = config.methods;
    result.sigma_grid = config.sigma_grid;
    result.t_grid = config.t_grid;
    result.trials = config.trials;
    result.true_k = from_file
                        ? (file_cloud.has_labels() ? distinct_labels(file_cloud.labels)
                                                   : 0)
                        : config.dataset.k();
    const std::size_t fixed_k = config.k > 0 ? config.k : result.true_k;

    const std::size_t nm = config.methods.size();
    const std::size_t ns = config.sigma_grid.size();
    const std::size_t nt = config.t_grid.size();
    const std::size_t ntrials = config.trials;
    result.cells.assign(nm * ns * nt, SweepCell{});

    std::vector<TrialSlot> slots(nm * ns * nt * ntrials);
    auto slot = [&](std::size_t mi, std::size_t si, std::size_t ti,
                    std::size_t tr) -> TrialSlot& {
        return slots[((mi * ns + si) * nt + ti) * ntrials + tr];
    };
    std::vector<int> gap_khat(ns * ntrials, 0);
    std::vector<char> gap_ok(ns * ntrials, 0);

    parallel_for(ns * ntrials, [&](std::size_t job) {
        const std::size_t si = job / ntrials;
        const std::size_t trial = job % ntrials;
        const double sigma = config.sigma_grid[si];

        PointCloud cloud;
        if (from_file) {
            cloud = file_cloud;
        } else {
            DatasetSpec spec = config.dataset;
            spec.seed = config.base_seed + trial;
            cloud = generate(spec);
        }
        const bool truth = cloud.has_labels();

        auto record = [&](std::size_t mi, std::size_t ti, const std::vector<int>& labels,
                          std::size_t k_used) {
            TrialSlot& s = slot(mi, si, ti, trial);
            s.ok = true;
            s.khat = static_cast<int>(k_used);
            if (truth) {
                const AccuracyReport rep = score(labels, cloud.labels);
                s.overall = rep.overall;
                s.average = rep.average;
            }
        };

        // shared pipeline: kernel graph and random-walk spectrum, built on
        // demand, reused by lund and the eigengap row
        bool dec_built = false;
        SpectralDecomposition dec;
        auto ensure_dec = [&] {
            if (!dec_built) {
                const KernelGraph graph = build_graph(cloud, sigma, config.graph_knn);
                const MarkovChain chain = build_chain(graph);
                EigOptions eo;
                eo.m = std::min(config.eigs, cloud.n);
                dec = eig_markov(chain, eo);
                dec_built = true;
            }
        };

        for (std::size_t mi = 0; mi < nm; ++mi) {
            const Method method = config.methods[mi];
            try {
                switch (method) {
                    case Method::lund: {
                        ensure_dec();
                        const DensityEstimate dens = make_density(cloud, sigma, config);
                        const LundConfig lc = make_lund_config(config, fixed_k);
                        for (std::size_t ti = 0; ti < nt; ++ti) {
                            try {
                                const DiffusionOperator op(dec, config.t_grid[ti],
                                                           Measure::inverse_pi);
                                const LundResult r = lund_from_operator(op, dens, lc);
                                record(mi, ti, r.labels, r.k_hat);
                            } catch (const Error& e) {
                                std::cerr << "sweep cell lund sigma=" << sigma
                                          << " t=" << config.t_grid[ti] << ": "
                                          << e.what() << "\n";
                            }
                        }
                        break;
                    }
                    case Method::fsfdpc: {
                        if (fixed_k == 0)
                            throw InvalidParameterError(
                                "fsfdpc needs k (no ground truth to take it from)");
                        const DensityEstimate dens = make_density(cloud, sigma, config);
                        const BaselineResult r = fsfdpc(cloud, dens, fixed_k);
                        for (std::size_t ti = 0; ti < nt; ++ti)
                            record(mi, ti, r.labels, r.k_used);
                        break;
                    }
                    case Method::spectral_shi:
                    case Method::spectral_ng: {
                        if (fixed_k == 0)
                            throw InvalidParameterError(
                                "spectral baselines need k (no ground truth)");
                        KmeansOptions ko;
                        ko.seed = config.base_seed + trial;
                        const BaselineResult r =
                            method == Method::spectral_shi
                                ? spectral_shi(cloud, sigma, fixed_k, ko)
                                : spectral_ng(cloud, sigma, fixed_k, ko);
                        for (std::size_t ti = 0; ti < nt; ++ti)
                            record(mi, ti, r.labels, r.k_used);
                        break;
                    }
                    case Method::kmeans: {
                        if (fixed_k == 0)
                            throw InvalidParameterError("kmeans needs k (no ground truth)");
                        Eigen::MatrixXd pts(cloud.n, cloud.dim);
                        for (std::size_t i = 0; i < cloud.n; ++i)
                            for (std::size_t d = 0; d < cloud.dim; ++d)
                                pts(static_cast<Eigen::Index>(i),
                                    static_cast<Eigen::Index>(d)) = cloud.row(i)[d];
                        KmeansOptions ko;
                        ko.seed = config.base_seed + trial;
                        const BaselineResult r = kmeans(pts, fixed_k, ko);
                        for (std::size_t ti = 0; ti < nt; ++ti)
                            record(mi, ti, r.labels, r.k_used);
                        break;
                    }
                }
            } catch (const Error& e) {
                std::cerr << "sweep " << method_name(method) << " sigma=" << sigma
                          << " trial=" << trial << ": " << e.what() << "\n";
            }
        }

        if (config.eigengap_row) {
            try {
                // feed the top of the random-walk spectrum (descending): on
                // near-reducible data the flattest consecutive gap sits at
                // the top, which is what this estimator is known for
                // answering. Only the leading eigenvalues are inspected, as
                // is conventional; deep-spectrum degeneracies are not gaps
                // anyone would read off a scree plot.
                ensure_dec();
                SpectralDecomposition top;
                const Eigen::Index keep =
                    std::min<Eigen::Index>(10, dec.values.size());
                top.values = dec.values.head(keep);
                gap_khat[si * ntrials + trial] =
                    static_cast<int>(eigengap_khat(top));
                gap_ok[si * ntrials + trial] = 1;
            } catch (const Error& e) {
                std::cerr << "sweep eigengap sigma=" << sigma << " trial=" << trial
                          << ": " << e.what() << "\n";
            }
        }
    });

    for (std::size_t mi = 0; mi < nm; ++mi)
        for (std::size_t si = 0; si < ns; ++si)
            for (std::size_t ti = 0; ti < nt; ++ti) {
                SweepCell& cell = result.at(mi, si, ti);
                double sum_o = 0.0, sum_a = 0.0;
                std::size_t n_acc = 0;
                std::vector<int> khats;
                for (std::size_t tr = 0; tr < ntrials; ++tr) {
                    const TrialSlot& s = slot(mi, si, ti, tr);
                    if (!s.ok) continue;
                    ++cell.completed;
                    khats.push_back(s.khat);
                    if (std::isfinite(s.overall)) {
                        sum_o += s.overall;
                        sum_a += s.average;
                        ++n_acc;
                    }
                }
                cell.failures = ntrials - cell.completed;
                if (n_acc > 0) {
                    cell.mean_overall = sum_o / static_cast<double>(n_acc);
                    cell.mean_average = sum_a / static_cast<double>(n_acc);
                }
                if (!khats.empty()) {
                    cell.modal_khat = modal_value(khats);
                    cell.khat_sign = quantize_khat(cell.modal_khat, result.true_k);
                }
            }

    if (config.eigengap_row) {
        result.eigengap_khat.assign(ns, 0);
        for (std::size_t si = 0; si < ns; ++si) {
            std::vector<int> vals;
            for (std::size_t tr = 0; tr < ntrials; ++tr)
                if (gap_ok[si * ntrials + tr])
                    vals.push_back(gap_khat[si * ntrials + tr]);
            result.eigengap_khat[si] = vals.empty() ? 0 : modal_value(vals);
        }
    }
    return result;
}

void write_sweep_outputs(const SweepResult& result, const std::string& out_dir) {
    const std::size_t nm = result.methods.size();
    const std::size_t ns = result.sigma_grid.size();
    const std::size_t nt = result.t_grid.size();

    std::ostringstream res;
    res << "method,sigma,t,mean_overall,mean_average,modal_khat,khat_sign,"
           "completed,failures\n";
    for (std::size_t mi = 0; mi < nm; ++mi)
        for (std::size_t si = 0; si < ns; ++si)
            for (std::size_t ti = 0; ti < nt; ++ti) {
                const SweepCell& c = result.at(mi, si, ti);
                res << method_name(result.methods[mi]) << ","
                    << fmt_g(result.sigma_grid[si]) << "," << result.t_grid[ti] << ","
                    << fmt_g(c.mean_overall) << "," << fmt_g(c.mean_average) << ","
                    << c.modal_khat << "," << c.khat_sign << "," << c.completed << ","
                    << c.failures << "\n";
            }
    write_text_file(out_dir + "/results.csv", res.str());

    std::ostringstream kh;
    kh << "method,sigma,t,modal_khat,khat_sign\n";
    for (std::size_t mi = 0; mi < nm; ++mi)
        for (std::size_t si = 0; si < ns; ++si)
            for (std::size_t ti = 0; ti < nt; ++ti) {
                const SweepCell& c = result.at(mi, si, ti);
                kh << method_name(result.methods[mi]) << ","
                   << fmt_g(result.sigma_grid[si]) << "," << result.t_grid[ti] << ","
                   << c.modal_khat << "," << c.khat_sign << "\n";
            }
    if (!result.eigengap_khat.empty())
        for (std::size_t si = 0; si < ns; ++si) {
            const int kh_val = result.eigengap_khat[si];
            kh << "eigengap," << fmt_g(result.sigma_grid[si]) << ",0," << kh_val << ","
               << quantize_khat(kh_val, result.true_k) << "\n";
        }
    write_text_file(out_dir + "/khat.csv", kh.str());

    for (std::size_t mi = 0; mi < nm; ++mi) {
        const std::string name = method_name(result.methods[mi]);
        HeatmapSpec hm;
        hm.title = "mean overall accuracy: " + name;
        hm.row_values = result.sigma_grid;
        std::vector<double> cols;
        for (std::uint64_t t : result.t_grid) cols.push_back(static_cast<double>(t));
        hm.col_values = cols;
        hm.cells.resize(ns * nt);
        for (std::size_t si = 0; si < ns; ++si)
            for (std::size_t ti = 0; ti < nt; ++ti)
                hm.cells[si * nt + ti] = result.at(mi, si, ti).mean_overall;
        write_text_file(out_dir + "/acc_" + name + ".svg", render_heatmap(hm));

        if (result.methods[mi] == Method::lund && result.true_k > 0) {
            HeatmapSpec km;
            km.title = "model order vs truth (-1/0/+1): " + name;
            km.row_values = result.sigma_grid;
            km.col_values = cols;
            km.lo = -1.0;
            km.hi = 1.0;
            km.cells.resize(ns * nt);
            for (std::size_t si = 0; si < ns; ++si)
                for (std::size_t ti = 0; ti < nt; ++ti) {
                    const SweepCell& c = result.at(mi, si, ti);
                    km.cells[si * nt + ti] =
                        c.completed == 0 ? kNaN : static_cast<double>(c.khat_sign);
                }
            write_text_file(out_dir + "/khat_" + name + ".svg", render_heatmap(km));
        }
    }
}

DiagnoseResult run_diagnose(const PointCloud& cloud, double sigma,
                            const std::vector<std::uint64_t>& t_grid,
                            std::size_t graph_knn, std::size_t subsample) {
    if (!cloud.has_labels())
        throw InvalidParameterError("diagnose: cloud has no block labels");
    const Partition partition = Partition::from_labels(cloud.labels);
    const KernelGraph graph = build_graph(cloud, sigma, graph_knn);
    const MarkovChain chain = build_chain(graph);

    DiagnoseResult out;
    out.sigma = sigma;
    out.report = mesoscopic_report(chain, partition,
                                   t_grid.empty() ? default_t_grid() : t_grid,
                                   subsample);
    EigOptions eo;
    eo.m = 2;
    const SpectralDecomposition dec = eig_markov(chain, eo);
    out.lambda2 = dec.values[1];
    out.pi_min = chain.pi.minCoeff();
    return out;
}

void write_diagnose_outputs(const DiagnoseResult& diag, const std::string& out_dir) {
    const MesoscopicReport& rep = diag.report;
    const std::string tag = fmt_sigma(diag.sigma);
    const std::size_t nt = rep.t_grid.size();

    // global relative-equilibration curve lambda_2^t / pi_min
    Eigen::VectorXd two(2);
    two << 1.0, diag.lambda2;
    std::vector<double> global_curve(nt);
    for (std::size_t ti = 0; ti < nt; ++ti)
        global_curve[ti] =
            std::abs(spectral_attenuation(two, rep.t_grid[ti])[1]) / diag.pi_min;

    nlohmann::json j = nlohmann::json::parse(to_json(rep));
    j["sigma"] = diag.sigma;
    j["lambda2"] = diag.lambda2;
    j["pi_min"] = diag.pi_min;
    j["global"] = global_curve;
    write_text_file(out_dir + "/diag_" + tag + ".json", j.dump(2));

    std::ostringstream csv;
    csv << "t,bound,empirical,global,gamma,dtin,dtbtw\n";
    for (std::size_t ti = 0; ti < nt; ++ti)
        csv << rep.t_grid[ti] << "," << fmt_g(rep.bound_curve[ti]) << ","
            << fmt_g(rep.empirical_curve[ti]) << "," << fmt_g(global_curve[ti]) << ","
            << fmt_g(rep.gamma_curve[ti]) << "," << fmt_g(rep.dtin_curve[ti]) << ","
            << fmt_g(rep.dtbtw_curve[ti]) << "\n";
    write_text_file(out_dir + "/diag_" + tag + ".csv", csv.str());

    std::vector<double> tx;
    for (std::uint64_t t : rep.t_grid) tx.push_back(static_cast<double>(t));

    CurvePlotSpec bounds;
    bounds.title = "operator deviation from block limit, sigma = " + tag;
    bounds.y_label = "max row l1 deviation";
    bounds.series = {
        {"bound t*delta + kappa*lambda^t", "#d62728", true, tx, rep.bound_curve},
        {"empirical", "#1f77b4", false, tx, rep.empirical_curve},
        {"global lambda2^t / pi_min", "#2ca02c", true, tx, global_curve},
    };
    write_text_file(out_dir + "/diag_" + tag + "_bound.svg", render_curves(bounds));

    CurvePlotSpec dt;
    dt.title = "within vs between diffusion distances, sigma = " + tag;
    dt.y_label = "distance";
    dt.y_floor = 1e-12;
    dt.series = {
        {"max within-block D_t", "#1f77b4", false, tx, rep.dtin_curve},
        {"min between-block D_t", "#d62728", false, tx, rep.dtbtw_curve},
    };
    write_text_file(out_dir + "/diag_" + tag + "_dt.svg", render_curves(dt));
}

ClusterRun run_cluster(const PointCloud& cloud, Method method,
                       const ExperimentConfig& config, double sigma, std::uint64_t t) {
    const std::size_t true_k =
        cloud.has_labels() ? distinct_labels(cloud.labels) : 0;
    const std::size_t fixed_k = config.k > 0 ? config.k : true_k;

    ClusterRun run;
    run.method = method_name(method);
    const auto t0 = std::chrono::steady_clock::now();

    switch (method) {
        case Method::lund: {
            LundParams lp;
            lp.sigma = sigma;
            lp.graph_knn = config.graph_knn;
            lp.kde_knn = config.kde_knn;
            lp.kde_sigma = config.kde_sigma;
            LundConfig lc = make_lund_config(config, fixed_k);
            lc.t = t;
            const LundResult r = lund(cloud, lp, lc);
            run.labels = r.labels;
            run.k_used = r.k_hat;
            run.modes = r.modes;
            break;
        }
        case Method::fsfdpc: {
            if (fixed_k == 0) throw InvalidParameterError("fsfdpc needs k");
            const DensityEstimate dens = make_density(cloud, sigma, config);
            const BaselineResult r = fsfdpc(cloud, dens, fixed_k);
            run.labels = r.labels;
            run.k_used = r.k_used;
            break;
        }
        case Method::spectral_shi:
        case Method::spectral_ng: {
            if (fixed_k == 0) throw InvalidParameterError("spectral baseline needs k");
            KmeansOptions ko;
            ko.seed = config.base_seed;
            const BaselineResult r = method == Method::spectral_shi
                                         ? spectral_shi(cloud, sigma, fixed_k, ko)
                                         : spectral_ng(cloud, sigma, fixed_k, ko);
            run.labels = r.labels;
            run.k_used = r.k_used;
            break;
        }
        case Method::kmeans: {
            if (fixed_k == 0) throw InvalidParameterError("kmeans needs k");
            Eigen::MatrixXd pts(cloud.n, cloud.dim);
            for (std::size_t i = 0; i < cloud.n; ++i)
                for (std::size_t d = 0; d < cloud.dim; ++d)
                    pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) =
                        cloud.row(i)[d];
            KmeansOptions ko;
            ko.seed = config.base_seed;
            const BaselineResult r = kmeans(pts, fixed_k, ko);
            run.labels = r.labels;
            run.k_used = r.k_used;
            break;
        }
    }
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                      .count();
    if (cloud.has_labels()) {
        const AccuracyReport rep = score(run.labels, cloud.labels);
        run.overall = rep.overall;
        run.average = rep.average;
    }
    return run;
}

}  // namespace lund
