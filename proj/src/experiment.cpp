#include "dsid/experiment.hpp"

#include "dsid/gramian.hpp"
#include "dsid/metrics.hpp"
#include "dsid/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

namespace dsid {

namespace {

// Seed-stream tags; never reuse one for two purposes.
constexpr std::uint64_t kTagRun = 0x72756e00;    // "run"
constexpr std::uint64_t kTagInput = 0x696e7000;  // "inp"
constexpr std::uint64_t kTagNoise = 0x6e7300;    // "ns"

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) {
        throw Error("cannot open " + path + " for writing");
    }
    return os;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (N < 1 || T < 2) {
        throw InvalidArgument("experiment needs N >= 1 and T >= 2");
    }
    if (n_runs < 1) {
        throw InvalidArgument("experiment needs n_runs >= 1");
    }
    if (!(snr_db > 0.0) && std::isfinite(snr_db)) {
        throw InvalidArgument("snr_db must be positive (or +inf for noise-free)");
    }
    if (decay_row < 0 || decay_row >= N) {
        throw InvalidArgument("decay_row outside 0..N-1");
    }
    for (Index p : decay_p) {
        if (p < 1) throw InvalidArgument("decay study needs p >= 1");
    }
    if (!mc_with_reg && !mc_without_reg) {
        throw InvalidArgument("at least one regularization mode must be enabled");
    }
    if (mc_variants.empty()) {
        throw InvalidArgument("at least one variant must be enabled");
    }
    omega.validate();
    sim.validate();
}

Json experiment_to_json(const ExperimentConfig& config) {
    Json j;
    j["model_source"] = config.model_source;
    j["N"] = config.N;
    j["T"] = config.T;
    j["snr_db"] = std::isfinite(config.snr_db) ? Json(config.snr_db) : Json("inf");
    j["omega"] = omegaspec_to_json(config.omega);
    Json variants = Json::array();
    for (auto v : config.mc_variants) variants.push_back(to_string(v));
    j["mc_variants"] = std::move(variants);
    j["mc_with_reg"] = config.mc_with_reg;
    j["mc_without_reg"] = config.mc_without_reg;
    j["sim"] = simconfig_to_json(config.sim);
    j["n_runs"] = config.n_runs;
    j["master_seed"] = config.master_seed;
    j["out_dir"] = config.out_dir;
    j["share_model"] = config.share_model;
    j["decay_row"] = config.decay_row;
    j["decay_p"] = config.decay_p;
    return j;
}

ExperimentConfig experiment_from_json(const Json& j) {
    ExperimentConfig config;
    if (j.contains("model_source")) config.model_source = j["model_source"].get<std::string>();
    if (j.contains("N")) config.N = j["N"].get<Index>();
    if (j.contains("T")) config.T = j["T"].get<Index>();
    if (j.contains("snr_db")) {
        if (j["snr_db"].is_string()) {
            config.snr_db = std::numeric_limits<double>::infinity();
        } else {
            config.snr_db = j["snr_db"].get<double>();
        }
    }
    if (j.contains("omega")) config.omega = omegaspec_from_json(j["omega"]);
    if (j.contains("mc_variants")) {
        config.mc_variants.clear();
        for (const auto& v : j["mc_variants"]) {
            if (v.is_number_integer()) {
                config.mc_variants.push_back(
                    omega_variant_from_string(std::to_string(v.get<int>())));
            } else {
                config.mc_variants.push_back(omega_variant_from_string(v.get<std::string>()));
            }
        }
    }
    if (j.contains("mc_with_reg")) config.mc_with_reg = j["mc_with_reg"].get<bool>();
    if (j.contains("mc_without_reg")) config.mc_without_reg = j["mc_without_reg"].get<bool>();
    if (j.contains("sim")) config.sim = simconfig_from_json(j["sim"]);
    if (j.contains("n_runs")) config.n_runs = j["n_runs"].get<Index>();
    if (j.contains("master_seed")) config.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("out_dir")) config.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("share_model")) config.share_model = j["share_model"].get<bool>();
    if (j.contains("decay_row")) config.decay_row = j["decay_row"].get<Index>();
    if (j.contains("decay_p")) config.decay_p = j["decay_p"].get<std::vector<Index>>();
    config.validate();
    return config;
}

GlobalModel load_model(const ExperimentConfig& config) {
    if (config.model_source == "benchmark") {
        return make_benchmark_chain(config.N);
    }
    GlobalModel model = model_from_json(read_json(config.model_source));
    if (model.N() != config.N) {
        throw InvalidArgument("model file has N = " + std::to_string(model.N()) +
                              " but the config says " + std::to_string(config.N));
    }
    return model;
}

Matrix predict_outputs(const GlobalModel& model, const Matrix& U, Index T) {
    return simulate(model, U, Vector::Zero(model.N() * model.n()), T).Y;
}

VafReport monte_carlo(const ExperimentConfig& config) {
    config.validate();
    const GlobalModel model = load_model(config);
    std::filesystem::create_directories(config.out_dir);

    // Cell grid: variant x regularization mode.
    struct CellSpec {
        OmegaVariant variant;
        double reg;
    };
    std::vector<CellSpec> cell_specs;
    for (auto variant : config.mc_variants) {
        if (config.mc_without_reg) cell_specs.push_back({variant, 0.0});
        if (config.mc_with_reg && config.sim.reg > 0.0) {
            cell_specs.push_back({variant, config.sim.reg});
        }
    }

    VafReport report;
    for (Index run = 0; run < config.n_runs; ++run) {
        const std::uint64_t run_seed = derive_seed(config.master_seed, kTagRun, run);
        // One dataset per run, shared by every cell.
        const Matrix U = white_noise_inputs(config.N, model.m(), config.T,
                                            derive_seed(run_seed, kTagInput));
        DataSet data = simulate(model, U, Vector::Zero(config.N * model.n()), config.T);
        data.X.reset();  // states are not used downstream; free the memory
        if (std::isfinite(config.snr_db)) {
            data.Y = add_noise_snr(data.Y, config.snr_db, derive_seed(run_seed, kTagNoise));
        }

        for (const auto& cell : cell_specs) {
            RunCellResult row;
            row.run = run;
            row.variant = cell.variant;
            row.reg = cell.reg;
            try {
                OmegaSpec spec = config.omega;
                spec.variant = cell.variant;
                SimConfig cfg = config.sim;
                cfg.reg = cell.reg;
                const IdentifiedGlobal idg = run_algorithm1(data, spec, cfg,
                                                            config.share_model);
                if (!idg.model) {
                    std::string message = "identification incomplete:";
                    for (const auto& [idx, err] : idg.failures) {
                        message += " [" + std::to_string(idx) + "] " + err;
                    }
                    throw Error(message);
                }
                const Matrix pred = predict_outputs(*idg.model, U, config.T);
                row.vaf_per_subsystem = vaf_per_channel(data.Y, pred);
                row.mean_vaf = row.vaf_per_subsystem.mean();
                std::set<std::pair<double, double>> points;
                for (Index i = 0; i < idg.model->N(); ++i) {
                    const auto eig =
                        Eigen::EigenSolver<Matrix>(idg.model->local(i).A, false).eigenvalues();
                    for (Index e = 0; e < eig.size(); ++e) {
                        points.emplace(eig(e).real(), eig(e).imag());
                    }
                }
                row.eig_points.assign(points.begin(), points.end());
                row.ok = true;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            report.rows.push_back(std::move(row));
        }
    }

    // Aggregate per cell; rows are run-major so group by (variant, reg).
    for (const auto& cell : cell_specs) {
        VafReport::Cell agg;
        agg.variant = cell.variant;
        agg.reg = cell.reg;
        double sum = 0.0, sum_s2 = 0.0;
        agg.min_run_mean = std::numeric_limits<double>::infinity();
        agg.max_run_mean = -std::numeric_limits<double>::infinity();
        for (const auto& row : report.rows) {
            if (row.variant != cell.variant || row.reg != cell.reg) continue;
            if (!row.ok) {
                ++agg.failed_runs;
                continue;
            }
            ++agg.ok_runs;
            sum += row.mean_vaf;
            agg.min_run_mean = std::min(agg.min_run_mean, row.mean_vaf);
            agg.max_run_mean = std::max(agg.max_run_mean, row.mean_vaf);
            // the paper's table tracks S_2 (1-based), i.e. subsystem index 1
            const Index s2 = std::min<Index>(1, model.N() - 1);
            sum_s2 += row.vaf_per_subsystem.segment(s2 * model.r(), model.r()).mean();
        }
        if (agg.ok_runs > 0) {
            agg.mean_vaf = sum / static_cast<double>(agg.ok_runs);
            agg.mean_vaf_s2 = sum_s2 / static_cast<double>(agg.ok_runs);
        } else {
            agg.min_run_mean = agg.max_run_mean = 0.0;
        }
        report.cells.push_back(agg);
    }
    report.all_failed =
        std::none_of(report.rows.begin(), report.rows.end(), [](const auto& r) { return r.ok; });

    // --- artifacts ---
    const std::filesystem::path out(config.out_dir);
    {
        auto os = open_out((out / "runs.csv").string());
        os << "run,variant,reg,ok,mean_vaf,min_vaf,max_vaf,error\n";
        for (const auto& row : report.rows) {
            os << row.run << ',' << to_string(row.variant) << ',' << format_double(row.reg)
               << ',' << (row.ok ? 1 : 0) << ',';
            if (row.ok) {
                os << format_double(row.mean_vaf) << ','
                   << format_double(row.vaf_per_subsystem.minCoeff()) << ','
                   << format_double(row.vaf_per_subsystem.maxCoeff()) << ',';
            } else {
                os << ",,,";
            }
            std::string err = row.error;
            std::replace(err.begin(), err.end(), ',', ';');
            std::replace(err.begin(), err.end(), '\n', ' ');
            os << err << "\n";
        }
    }
    {
        auto os = open_out((out / "table.csv").string());
        os << "variant,reg,mean_vaf,mean_vaf_s2,min_run_mean,max_run_mean,ok_runs,failed_runs\n";
        for (const auto& cell : report.cells) {
            os << to_string(cell.variant) << ',' << format_double(cell.reg) << ','
               << format_double(cell.mean_vaf) << ',' << format_double(cell.mean_vaf_s2) << ','
               << format_double(cell.min_run_mean) << ',' << format_double(cell.max_run_mean)
               << ',' << cell.ok_runs << ',' << cell.failed_runs << "\n";
        }
    }
    {
        auto os = open_out((out / "vaf_histogram.csv").string());
        os << "run,variant,reg,subsystem,vaf\n";
        for (const auto& row : report.rows) {
            if (!row.ok) continue;
            for (Index ch = 0; ch < row.vaf_per_subsystem.size(); ++ch) {
                os << row.run << ',' << to_string(row.variant) << ',' << format_double(row.reg)
                   << ',' << ch / model.r() << ',' << format_double(row.vaf_per_subsystem(ch))
                   << "\n";
            }
        }
    }
    {
        auto os = open_out((out / "eig_scatter.csv").string());
        os << "run,variant,reg,re,im\n";
        for (const auto& row : report.rows) {
            for (const auto& [re, im] : row.eig_points) {
                os << row.run << ',' << to_string(row.variant) << ',' << format_double(row.reg)
                   << ',' << format_double(re) << ',' << format_double(im) << "\n";
            }
        }
    }
    {
        Json j;
        j["config"] = experiment_to_json(config);
        Json cells = Json::array();
        for (const auto& cell : report.cells) {
            cells.push_back(Json{{"variant", to_string(cell.variant)},
                                 {"reg", cell.reg},
                                 {"mean_vaf", cell.mean_vaf},
                                 {"mean_vaf_s2", cell.mean_vaf_s2},
                                 {"min_run_mean", cell.min_run_mean},
                                 {"max_run_mean", cell.max_run_mean},
                                 {"ok_runs", cell.ok_runs},
                                 {"failed_runs", cell.failed_runs}});
        }
        j["cells"] = std::move(cells);
        j["all_failed"] = report.all_failed;
        write_json((out / "report.json").string(), j);
    }
    return report;
}

DecayStudy decay_study(const ExperimentConfig& config) {
    config.validate();
    const GlobalModel model = load_model(config);
    const Index n = model.n();
    DecayStudy study;
    for (Index p : config.decay_p) {
        const GramianBundle bundle = finite_time_gramian(model, p);
        const DecayEnvelope env = decay_envelope(bundle);
        DecayStudy::PerP curve;
        curve.p = p;
        curve.kappa = bundle.kappa;
        curve.c = env.c;
        curve.lambda = env.lambda;
        curve.block_norms.resize(model.N());
        curve.envelope.resize(model.N());
        for (Index j = 0; j < model.N(); ++j) {
            curve.block_norms(j) =
                bundle.D.block(config.decay_row * n, j * n, n, n).norm();
            curve.envelope(j) =
                env.c * std::pow(env.lambda,
                                 static_cast<double>(n * std::abs(config.decay_row - j)));
        }
        study.curves.push_back(std::move(curve));
    }

    std::filesystem::create_directories(config.out_dir);
    for (const auto& curve : study.curves) {
        const auto path = std::filesystem::path(config.out_dir) /
                          ("decay_p" + std::to_string(curve.p) + ".csv");
        write_decay_csv(path.string(), curve, config.decay_row);
    }
    return study;
}

void write_decay_csv(const std::string& path, const DecayStudy::PerP& curve, Index row) {
    auto os = open_out(path);
    os << "block_col,block_norm,envelope\n";
    for (Index j = 0; j < curve.block_norms.size(); ++j) {
        os << j << ',' << format_double(curve.block_norms(j)) << ','
           << format_double(curve.envelope(j)) << "\n";
    }
    (void)row;
}

}  // namespace dsid
