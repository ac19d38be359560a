#pragma once

#include "dsid/dataset.hpp"
#include "dsid/decentral.hpp"
#include "dsid/io.hpp"
#include "dsid/model.hpp"
#include "dsid/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dsid {

/// Everything a reproducible experiment depends on. Round-trips through JSON.
struct ExperimentConfig {
    std::string model_source = "benchmark";  // "benchmark" or a model JSON path
    Index N = 500;
    Index T = 10000;
    double snr_db = 25.0;
    OmegaSpec omega;                         // variant for `identify`, p/t throughout
    std::vector<OmegaVariant> mc_variants = {OmegaVariant::V2, OmegaVariant::V3,
                                             OmegaVariant::V4, OmegaVariant::V5};
    bool mc_with_reg = true;                 // Table-I columns: with/without reg
    bool mc_without_reg = true;
    SimConfig sim;
    Index n_runs = 20;
    std::uint64_t master_seed = 1;
    std::string out_dir = "out";
    bool share_model = true;
    Index decay_row = 49;                    // 0-based block row (the paper's 50th)
    std::vector<Index> decay_p = {1, 2, 3};

    void validate() const;
};

Json experiment_to_json(const ExperimentConfig& config);
ExperimentConfig experiment_from_json(const Json& j);

/// Benchmark chain or a model file, per config.model_source.
GlobalModel load_model(const ExperimentConfig& config);

/// One (run, variant, reg) Monte-Carlo cell.
struct RunCellResult {
    Index run = 0;
    OmegaVariant variant = OmegaVariant::V2;
    double reg = 0;
    bool ok = false;
    Vector vaf_per_subsystem;  // empty when the run failed
    double mean_vaf = 0;
    std::string error;
    std::vector<std::pair<double, double>> eig_points;  // distinct (re, im) of local Â's
};

struct VafReport {
    struct Cell {
        OmegaVariant variant = OmegaVariant::V2;
        double reg = 0;
        double mean_vaf = 0;     // mean over successful runs of per-run mean VAF
        double mean_vaf_s2 = 0;  // same, subsystem 2 only (1-based; the paper's table)
        double min_run_mean = 0;
        double max_run_mean = 0;
        Index ok_runs = 0;
        Index failed_runs = 0;
    };
    std::vector<RunCellResult> rows;  // per-run table, run-major then cell order
    std::vector<Cell> cells;
    bool all_failed = false;
};

/// Runs n_runs experiments (dataset regenerated per run from derived seeds,
/// shared across the variant/reg cells) and writes per-run, aggregate,
/// histogram and eigenvalue-scatter CSVs plus report.json into out_dir.
VafReport monte_carlo(const ExperimentConfig& config);

/// Fig. 1(a): per requested p, the Frobenius norms of the blocks D_{row,j}
/// next to the envelope c * lambda^{n |row-j|}.
struct DecayStudy {
    struct PerP {
        Index p = 0;
        double kappa = 0;
        double c = 0;
        double lambda = 0;
        Vector block_norms;  // indexed by block column j
        Vector envelope;
    };
    std::vector<PerP> curves;
};

DecayStudy decay_study(const ExperimentConfig& config);
void write_decay_csv(const std::string& path, const DecayStudy::PerP& curve, Index row);

/// Noise-free outputs of `model` driven by U from a zero initial state.
Matrix predict_outputs(const GlobalModel& model, const Matrix& U, Index T);

}  // namespace dsid
