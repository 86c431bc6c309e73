#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dimwitness/estimator.hpp"
#include "dimwitness/io.hpp"
#include "dimwitness/simulate.hpp"
#include "dimwitness/version.hpp"
#include "dimwitness/witness.hpp"

namespace {

using dimwitness::io::json;

void write_text(const std::string& content, const std::string& path) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw dimwitness::InvalidInputError("cannot open output file: " + path);
    out << content;
}

void emit_manifest(const json& manifest, const std::string& path) {
    const std::string text = manifest.dump(2) + "\n";
    if (path.empty())
        std::cerr << text;
    else
        write_text(text, path);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("WITNESS_SEED")) {
        char* end = nullptr;
        const unsigned long long value = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0')
            throw dimwitness::InvalidInputError("WITNESS_SEED is not an unsigned integer");
        return value;
    }
    return 0;
}

// z for the complex-path subcommands: a file, or e_1.
dimwitness::CVec resolve_z(const std::string& z_path, Eigen::Index d,
                           std::vector<std::pair<std::string, std::string>>& digests) {
    if (z_path.empty()) return dimwitness::CVec::Unit(d, 0);
    digests.emplace_back(z_path, dimwitness::io::file_digest(z_path));
    return dimwitness::io::load_vector(z_path);
}

dimwitness::RVec to_real_vector(const dimwitness::CVec& z) {
    for (Eigen::Index i = 0; i < z.size(); ++i)
        if (z(i).imag() != 0.0)
            throw dimwitness::InvalidInputError("the real path requires a real vector z");
    return z.real();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dimension witness: exact projector-unitary series sums, sequential "
                 "measurement simulation, and dimension estimation"};
    app.set_version_flag("--version", dimwitness::kVersion);
    app.require_subcommand(1);

    // --- exact-sum ---------------------------------------------------------
    auto* cmd_exact = app.add_subcommand(
        "exact-sum", "Exact value of sum_n ||(PU)^n z||^2 from the spectral structure");
    std::string exact_matrix, exact_z, exact_out, exact_manifest;
    double exact_cluster_tol = -1.0, exact_rank_tol = 1e-8, exact_matrix_tol = 1e-10;
    bool exact_real = false;
    cmd_exact->add_option("matrix", exact_matrix, "matrix JSON file")->required();
    cmd_exact->add_option("--z", exact_z, "vector JSON file (default: e_1)");
    cmd_exact->add_flag("--real", exact_real, "use the real orthogonal decomposition");
    cmd_exact->add_option("--cluster-tol", exact_cluster_tol, "eigenvalue clustering tolerance");
    cmd_exact->add_option("--rank-tol", exact_rank_tol, "intersection rank tolerance");
    cmd_exact->add_option("--matrix-tol", exact_matrix_tol, "unitarity/orthogonality tolerance");
    cmd_exact->add_option("--out", exact_out, "output file (default: stdout)");
    cmd_exact->add_option("--manifest", exact_manifest, "manifest file (default: stderr)");

    // --- iterate -----------------------------------------------------------
    auto* cmd_iterate = app.add_subcommand("iterate", "Partial sums S_N of ||(PU)^n z||^2 as CSV");
    std::string it_matrix, it_z, it_out, it_manifest;
    double it_tail_tol = 1e-8;
    int it_steps = 100000;
    cmd_iterate->add_option("matrix", it_matrix, "matrix JSON file")->required();
    cmd_iterate->add_option("--z", it_z, "vector JSON file (default: e_1)");
    cmd_iterate->add_option("--steps", it_steps, "maximum number of recorded steps");
    cmd_iterate->add_option("--tail-tol", it_tail_tol, "geometric tail bound threshold");
    cmd_iterate->add_option("--out", it_out, "output file (default: stdout)");
    cmd_iterate->add_option("--manifest", it_manifest, "manifest file (default: stderr)");

    // --- sample ------------------------------------------------------------
    auto* cmd_sample =
        app.add_subcommand("sample", "Sample one outcome trajectory of the measurement process");
    std::string sm_matrix, sm_z, sm_out, sm_manifest;
    std::int64_t sm_length = 0;
    std::optional<std::uint64_t> sm_seed;
    cmd_sample->add_option("matrix", sm_matrix, "matrix JSON file")->required();
    cmd_sample->add_option("--z", sm_z, "vector JSON file (default: e_1)");
    cmd_sample->add_option("--length", sm_length, "trajectory length")->required();
    cmd_sample->add_option("--seed", sm_seed, "master seed (fallback: WITNESS_SEED, then 0)");
    cmd_sample->add_option("--out", sm_out,
                           "trajectory CSV file; the outcome string then goes to stdout");
    cmd_sample->add_option("--manifest", sm_manifest, "manifest file (default: stderr)");

    // --- return-time -------------------------------------------------------
    auto* cmd_return = app.add_subcommand(
        "return-time", "Monte Carlo mean return time to the initial state");
    std::string rt_matrix, rt_z, rt_out, rt_manifest;
    std::int64_t rt_returns = 0, rt_step_cap = 100000000;
    std::optional<std::uint64_t> rt_seed;
    bool rt_no_samples = false;
    cmd_return->add_option("matrix", rt_matrix, "matrix JSON file")->required();
    cmd_return->add_option("--z", rt_z, "vector JSON file (default: e_1)");
    cmd_return->add_option("--returns", rt_returns, "number of returns to collect")->required();
    cmd_return->add_option("--step-cap", rt_step_cap, "hard cap on sampled steps");
    cmd_return->add_option("--seed", rt_seed, "master seed (fallback: WITNESS_SEED, then 0)");
    cmd_return->add_flag("--no-samples", rt_no_samples, "omit the raw gap samples from the JSON");
    cmd_return->add_option("--out", rt_out, "output file (default: stdout)");
    cmd_return->add_option("--manifest", rt_manifest, "manifest file (default: stderr)");

    // --- estimate ----------------------------------------------------------
    auto* cmd_estimate = app.add_subcommand(
        "estimate", "Estimate the dimension from an ensemble of Haar evolutions");
    dimwitness::EstimatorConfig est_config;
    std::optional<std::uint64_t> est_seed;
    std::string est_out, est_manifest;
    cmd_estimate->add_option("--d", est_config.dimension, "dimension of the sampled unitaries")
        ->required();
    cmd_estimate->add_option("--M", est_config.ensemble_size, "ensemble size");
    cmd_estimate->add_option("--beta", est_config.quorum, "required quorum fraction");
    cmd_estimate->add_option("--s", est_config.stability_window, "stability window length");
    cmd_estimate->add_option("--n-max", est_config.max_steps, "step cap");
    cmd_estimate->add_option("--ceiling-clamp", est_config.ceiling_clamp, "ceiling clamp");
    cmd_estimate->add_flag("--quorum-at-stop", est_config.require_quorum_at_stop,
                           "check the quorum at the stopping step instead of the window start");
    cmd_estimate->add_option("--seed", est_seed, "master seed (fallback: WITNESS_SEED, then 0)");
    cmd_estimate->add_option("--out", est_out, "output file (default: stdout)");
    cmd_estimate->add_option("--manifest", est_manifest, "manifest file (default: stderr)");

    // --- sweep ---------------------------------------------------------
    auto* cmd_sweep =
        app.add_subcommand("sweep", "Run the estimator repeatedly over a dimension range");
    dimwitness::EstimatorConfig sweep_config;
    int sw_d_min = 2, sw_d_max = 8, sw_reps = 50, sw_threads = 0;
    std::optional<std::uint64_t> sw_seed;
    std::string sw_out, sw_summary, sw_manifest;
    cmd_sweep->add_option("--d-min", sw_d_min, "smallest dimension")->required();
    cmd_sweep->add_option("--d-max", sw_d_max, "largest dimension")->required();
    cmd_sweep->add_option("--reps", sw_reps, "runs per dimension");
    cmd_sweep->add_option("--M", sweep_config.ensemble_size, "ensemble size");
    cmd_sweep->add_option("--beta", sweep_config.quorum, "required quorum fraction");
    cmd_sweep->add_option("--s", sweep_config.stability_window, "stability window length");
    cmd_sweep->add_option("--n-max", sweep_config.max_steps, "step cap");
    cmd_sweep->add_option("--threads", sw_threads, "worker threads (0: hardware count)");
    cmd_sweep->add_option("--seed", sw_seed, "master seed (fallback: WITNESS_SEED, then 0)");
    cmd_sweep->add_option("--out", sw_out, "sweep CSV file (default: stdout)");
    cmd_sweep->add_option("--summary", sw_summary, "also write a per-dimension JSON summary");
    cmd_sweep->add_option("--manifest", sw_manifest, "manifest file (default: stderr)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::vector<std::pair<std::string, std::string>> digests;

        if (app.got_subcommand(cmd_exact)) {
            digests.emplace_back(exact_matrix, dimwitness::io::file_digest(exact_matrix));
            const auto file = dimwitness::io::load_matrix_file(exact_matrix, exact_matrix_tol);
            dimwitness::ExactSumReport report;
            if (exact_real || file.kind == "orthogonal") {
                if (file.kind != "orthogonal")
                    throw dimwitness::InvalidInputError(
                        "--real requires a matrix of kind \"orthogonal\"");
                dimwitness::OrthogonalMatrix r(file.real_data, exact_matrix_tol);
                dimwitness::RVec z =
                    to_real_vector(resolve_z(exact_z, r.dim(), digests));
                if (exact_real)
                    report = dimwitness::exact_sum_real(r, z, exact_rank_tol);
                else
                    report = dimwitness::exact_sum_complex(dimwitness::complexify(r),
                                                           z.cast<dimwitness::Complex>(),
                                                           exact_cluster_tol, exact_rank_tol);
            } else {
                dimwitness::UnitaryMatrix u(file.complex_data, exact_matrix_tol);
                const dimwitness::CVec z = resolve_z(exact_z, u.dim(), digests);
                report = dimwitness::exact_sum_complex(u, z, exact_cluster_tol, exact_rank_tol);
            }
            write_text(dimwitness::io::report_to_json(report).dump(2) + "\n", exact_out);
            const json config{{"matrix", exact_matrix},      {"z", exact_z},
                              {"real", exact_real},          {"cluster_tol", exact_cluster_tol},
                              {"rank_tol", exact_rank_tol},  {"matrix_tol", exact_matrix_tol},
                              {"out", exact_out}};
            emit_manifest(dimwitness::io::make_manifest("exact-sum", config, 0, digests),
                          exact_manifest);
        }

        if (app.got_subcommand(cmd_iterate)) {
            digests.emplace_back(it_matrix, dimwitness::io::file_digest(it_matrix));
            const auto u = dimwitness::io::load_unitary(it_matrix);
            const dimwitness::CVec z = resolve_z(it_z, u.dim(), digests);
            const auto series = dimwitness::iterate_norms(u, z, it_tail_tol, it_steps);
            write_text(dimwitness::io::iterate_csv(series), it_out);
            const json config{{"matrix", it_matrix},
                              {"z", it_z},
                              {"steps", it_steps},
                              {"tail_tol", it_tail_tol},
                              {"out", it_out}};
            emit_manifest(dimwitness::io::make_manifest("iterate", config, 0, digests),
                          it_manifest);
        }

        if (app.got_subcommand(cmd_sample)) {
            const std::uint64_t seed = resolve_seed(sm_seed);
            digests.emplace_back(sm_matrix, dimwitness::io::file_digest(sm_matrix));
            auto u = dimwitness::io::load_unitary(sm_matrix);
            const dimwitness::CVec z = resolve_z(sm_z, u.dim(), digests);
            const dimwitness::MeasurementProcess proc(std::move(u), z);
            const auto outcome =
                dimwitness::sample_outcomes(proc, sm_length, dimwitness::SeedStream{seed, 0});
            write_text(dimwitness::io::trajectory_csv(outcome), sm_out);
            if (!sm_out.empty()) std::cout << outcome.symbols << "\n";
            const json config{{"matrix", sm_matrix},
                              {"z", sm_z},
                              {"length", sm_length},
                              {"out", sm_out}};
            emit_manifest(dimwitness::io::make_manifest("sample", config, seed, digests),
                          sm_manifest);
        }

        if (app.got_subcommand(cmd_return)) {
            const std::uint64_t seed = resolve_seed(rt_seed);
            digests.emplace_back(rt_matrix, dimwitness::io::file_digest(rt_matrix));
            auto u = dimwitness::io::load_unitary(rt_matrix);
            const dimwitness::CVec z = resolve_z(rt_z, u.dim(), digests);
            const dimwitness::MeasurementProcess proc(std::move(u), z);
            const auto stats = dimwitness::monte_carlo_return_time(
                proc, rt_returns, dimwitness::SeedStream{seed, 0}, rt_step_cap);
            write_text(
                dimwitness::io::return_time_to_json(stats, !rt_no_samples).dump(2) + "\n",
                rt_out);
            const json config{{"matrix", rt_matrix},     {"z", rt_z},
                              {"returns", rt_returns},   {"step_cap", rt_step_cap},
                              {"samples", !rt_no_samples}, {"out", rt_out}};
            emit_manifest(dimwitness::io::make_manifest("return-time", config, seed, digests),
                          rt_manifest);
        }

        if (app.got_subcommand(cmd_estimate)) {
            est_config.master_seed = resolve_seed(est_seed);
            const auto result = dimwitness::run_estimator(est_config);
            write_text(dimwitness::io::estimator_result_to_json(est_config, result).dump(2) + "\n",
                       est_out);
            const json config{{"d", est_config.dimension},
                              {"M", est_config.ensemble_size},
                              {"beta", est_config.quorum},
                              {"s", est_config.stability_window},
                              {"n_max", est_config.max_steps},
                              {"ceiling_clamp", est_config.ceiling_clamp},
                              {"quorum_at_stop", est_config.require_quorum_at_stop},
                              {"out", est_out}};
            emit_manifest(
                dimwitness::io::make_manifest("estimate", config, est_config.master_seed, digests),
                est_manifest);
        }

        if (app.got_subcommand(cmd_sweep)) {
            sweep_config.master_seed = resolve_seed(sw_seed);
            const auto rows = dimwitness::experiment_sweep(sw_d_min, sw_d_max, sw_reps,
                                                           sweep_config, sw_threads);
            write_text(dimwitness::io::sweep_csv(rows), sw_out);
            if (!sw_summary.empty())
                write_text(
                    dimwitness::io::sweep_summary_to_json(dimwitness::sweep_summary(rows)).dump(2) +
                        "\n",
                    sw_summary);
            const json config{{"d_min", sw_d_min},
                              {"d_max", sw_d_max},
                              {"reps", sw_reps},
                              {"M", sweep_config.ensemble_size},
                              {"beta", sweep_config.quorum},
                              {"s", sweep_config.stability_window},
                              {"n_max", sweep_config.max_steps},
                              {"out", sw_out}};
            emit_manifest(
                dimwitness::io::make_manifest("sweep", config, sweep_config.master_seed, digests),
                sw_manifest);
        }
    } catch (const dimwitness::NumericFailureError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const dimwitness::InvalidInputError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
