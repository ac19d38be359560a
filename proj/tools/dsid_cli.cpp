#include "dsid/dataset.hpp"
#include "dsid/decentral.hpp"
#include "dsid/experiment.hpp"
#include "dsid/gramian.hpp"
#include "dsid/io.hpp"
#include "dsid/metrics.hpp"
#include "dsid/rng.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace dsid;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitAllFailed = 3;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> variant;
    std::optional<Index> t;
    std::optional<Index> p;
    std::optional<double> reg;
    bool no_reg = false;
    std::optional<double> snr;
    std::optional<Index> runs;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "Experiment config JSON");
    cmd->add_option("--seed", opts.seed, "Master seed");
    cmd->add_option("--out", opts.out, "Output directory");
    cmd->add_option("--variant", opts.variant, "Omega variant: 1..5 or general");
    cmd->add_option("--t", opts.t, "Block half-bandwidth t");
    cmd->add_option("--p", opts.p, "Lifting depth p");
    cmd->add_option("--reg", opts.reg, "Ridge regularization parameter");
    cmd->add_flag("--no-reg", opts.no_reg, "Disable regularization");
    cmd->add_option("--snr", opts.snr, "Output SNR in dB (inf for noise-free)");
    cmd->add_option("--runs", opts.runs, "Number of Monte-Carlo runs");
}

ExperimentConfig resolve_config(const CommonOpts& opts) {
    ExperimentConfig config;
    if (!opts.config_path.empty()) {
        config = experiment_from_json(read_json(opts.config_path));
    }
    if (opts.seed) config.master_seed = *opts.seed;
    if (opts.out) config.out_dir = *opts.out;
    if (opts.variant) {
        config.omega.variant = omega_variant_from_string(*opts.variant);
        config.mc_variants = {config.omega.variant};
    }
    if (opts.t) config.omega.t = *opts.t;
    if (opts.p) config.omega.p = *opts.p;
    if (opts.reg && opts.no_reg) {
        throw InvalidArgument("--reg and --no-reg are mutually exclusive");
    }
    if (opts.reg) {
        config.sim.reg = *opts.reg;
        config.mc_with_reg = true;
        config.mc_without_reg = false;
    }
    if (opts.no_reg) {
        config.sim.reg = 0.0;
        config.mc_with_reg = false;
        config.mc_without_reg = true;
    }
    if (opts.snr) config.snr_db = *opts.snr;
    if (opts.runs) config.n_runs = *opts.runs;
    config.validate();
    return config;
}

DataSet generate_dataset(const ExperimentConfig& config, const GlobalModel& model) {
    const std::uint64_t run_seed = derive_seed(config.master_seed, 0x72756e00 /* run */, 0);
    const Matrix U = white_noise_inputs(config.N, model.m(), config.T,
                                        derive_seed(run_seed, 0x696e7000 /* inp */));
    DataSet data = simulate(model, U, Vector::Zero(config.N * model.n()), config.T);
    if (std::isfinite(config.snr_db)) {
        data.Y = add_noise_snr(data.Y, config.snr_db, derive_seed(run_seed, 0x6e7300 /* ns */));
    }
    return data;
}

int cmd_generate(const CommonOpts& opts) {
    const ExperimentConfig config = resolve_config(opts);
    const GlobalModel model = load_model(config);
    DataSet data = generate_dataset(config, model);
    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path out(config.out_dir);
    write_json((out / "model.json").string(), model_to_json(model));
    write_dataset_csv((out / "data.csv").string(), data);
    std::cout << "wrote " << (out / "model.json").string() << " and "
              << (out / "data.csv").string() << " (N=" << config.N << ", T=" << config.T
              << ")\n";
    return kExitOk;
}

int cmd_gramian(const CommonOpts& opts) {
    const ExperimentConfig config = resolve_config(opts);
    const GlobalModel model = load_model(config);
    const Index p = config.omega.p;
    const RankReport rank = observability_rank_check(model, p);
    Json j;
    j["p"] = p;
    j["rank"] = rank.rank;
    j["full_rank"] = rank.full;
    j["nu"] = rank.nu ? Json(*rank.nu) : Json(nullptr);
    try {
        const GramianBundle bundle = finite_time_gramian(model, p);
        const DecayEnvelope env = decay_envelope(bundle);
        j["kappa"] = bundle.kappa;
        j["g"] = bundle.g;
        j["block_bandwidth"] = measured_block_bandwidth(bundle.J, model.n(), model.n(), 1e-14);
        j["c"] = env.c;
        j["lambda"] = env.lambda;
    } catch (const RankDeficientGramian& e) {
        j["error"] = std::string("rank-deficient Gramian: ") + e.what();
        std::cout << j.dump(2) << "\n";
        return kExitNumerical;
    }
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_decay(const CommonOpts& opts) {
    const ExperimentConfig config = resolve_config(opts);
    const DecayStudy study = decay_study(config);
    for (const auto& curve : study.curves) {
        std::cout << "p=" << curve.p << " kappa=" << curve.kappa << " lambda=" << curve.lambda
                  << " c=" << curve.c << " -> " << config.out_dir << "/decay_p" << curve.p
                  << ".csv\n";
    }
    return kExitOk;
}

int cmd_identify(const CommonOpts& opts) {
    const ExperimentConfig config = resolve_config(opts);
    const GlobalModel model = load_model(config);
    DataSet data = generate_dataset(config, model);
    const IdentifiedGlobal idg =
        run_algorithm1(data, config.omega, config.sim, config.share_model);
    Json j = identified_to_json(idg);
    j["provenance"]["master_seed"] = config.master_seed;
    j["provenance"]["snr_db"] =
        std::isfinite(config.snr_db) ? Json(config.snr_db) : Json("inf");
    double mean_vaf = 0.0;
    if (idg.model) {
        const Matrix pred = predict_outputs(*idg.model, data.U, data.T());
        const Vector v = vaf_per_channel(data.Y, pred);
        mean_vaf = v.mean();
        j["provenance"]["vaf_mean"] = mean_vaf;
        j["provenance"]["vaf_min"] = v.minCoeff();
        j["provenance"]["vaf_max"] = v.maxCoeff();
    }
    std::filesystem::create_directories(config.out_dir);
    const auto path = std::filesystem::path(config.out_dir) / "identified.json";
    write_json(path.string(), j);
    if (!idg.model) {
        std::cerr << "identification incomplete: " << idg.failures.size()
                  << " failure(s); partial results in " << path.string() << "\n";
        return kExitNumerical;
    }
    std::cout << "identified " << model.N() << " subsystems, mean VAF " << mean_vaf << "% -> "
              << path.string() << "\n";
    return kExitOk;
}

int cmd_evaluate(const std::string& identified_path, const std::string& truth_path) {
    const GlobalModel identified = model_from_json(read_json(identified_path));
    const GlobalModel truth = model_from_json(read_json(truth_path));
    const SimilarityFit fit = similarity_fit(identified, truth);
    double max_eig_distance = 0.0;
    Json locals = Json::array();
    for (Index i = 0; i < truth.N(); ++i) {
        const EigenCompare cmp = eigen_compare(identified.local(i).A, truth.local(i).A);
        max_eig_distance = std::max(max_eig_distance, cmp.max_distance);
        locals.push_back(Json{{"subsystem", i},
                              {"eig_max_distance", cmp.max_distance},
                              {"similarity_residual", fit.residuals(i)}});
    }
    Json j;
    j["locals"] = std::move(locals);
    j["max_eig_distance"] = max_eig_distance;
    j["max_similarity_residual"] = fit.max_residual;
    j["singular_Q"] = fit.singular;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_mc(const CommonOpts& opts) {
    const ExperimentConfig config = resolve_config(opts);
    const VafReport report = monte_carlo(config);
    std::printf("%-8s %-10s %-10s %-10s %s\n", "variant", "reg", "mean", "mean(S2)", "runs");
    for (const auto& cell : report.cells) {
        std::printf("%-8s %-10.4g %-10.4g %-10.4g %lld ok / %lld failed\n",
                    to_string(cell.variant).c_str(), cell.reg, cell.mean_vaf, cell.mean_vaf_s2,
                    static_cast<long long>(cell.ok_runs),
                    static_cast<long long>(cell.failed_runs));
    }
    std::cout << "artifacts in " << config.out_dir << "\n";
    if (report.all_failed) {
        std::cerr << "every Monte-Carlo run failed\n";
        return kExitAllFailed;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decentralized subspace identification of block-tridiagonal systems"};
    app.require_subcommand(1);

    CommonOpts generate_opts, gramian_opts, decay_opts, identify_opts, mc_opts;
    std::string identified_path, truth_path;

    add_common(app.add_subcommand("generate", "Write benchmark model and dataset files"),
               generate_opts);
    add_common(app.add_subcommand("gramian", "Observability rank / condition / bandwidth report"),
               gramian_opts);
    add_common(app.add_subcommand("decay", "Gramian-inverse off-diagonal decay CSVs"),
               decay_opts);
    add_common(app.add_subcommand("identify", "Single identification run"), identify_opts);
    auto* evaluate = app.add_subcommand("evaluate", "Compare an identified model against truth");
    evaluate->add_option("--identified", identified_path, "Identified model JSON")->required();
    evaluate->add_option("--truth", truth_path, "True model JSON")->required();
    add_common(app.add_subcommand("mc", "Monte-Carlo study (Table-I reproduction)"), mc_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (app.got_subcommand("generate")) return cmd_generate(generate_opts);
        if (app.got_subcommand("gramian")) return cmd_gramian(gramian_opts);
        if (app.got_subcommand("decay")) return cmd_decay(decay_opts);
        if (app.got_subcommand("identify")) return cmd_identify(identify_opts);
        if (app.got_subcommand("evaluate")) return cmd_evaluate(identified_path, truth_path);
        if (app.got_subcommand("mc")) return cmd_mc(mc_opts);
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
