#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dimwitness/estimator.hpp"
#include "dimwitness/simulate.hpp"
#include "dimwitness/version.hpp"
#include "dimwitness/witness.hpp"

namespace py = pybind11;
using namespace dimwitness;

namespace {

CVec default_z(const CVec& z, Eigen::Index d) {
    return z.size() == 0 ? CVec(CVec::Unit(d, 0)) : z;
}

py::dict report_to_dict(const ExactSumReport& report) {
    py::list per;
    for (const auto& entry : report.per_eigenspace)
        per.append(py::make_tuple(entry.eigenvalue, entry.dim_eigenspace,
                                  entry.dim_theta_intersection));
    py::dict out;
    out["dimension"] = report.dimension;
    out["exact_sum"] = report.exact_sum;
    out["dim_w"] = report.dim_w;
    out["contraction_radius"] = report.contraction_radius;
    out["per_eigenspace"] = per;
    return out;
}

py::dict estimator_result_to_dict(const EstimatorResult& result) {
    py::dict out;
    out["d_tilde"] = result.estimate;
    out["N_tilde"] = result.stopping_step;
    out["stopped_by"] = to_string(result.stopped_by);
    out["final_d"] = result.final_bounds;
    out["histories"] = result.histories;
    return out;
}

EstimatorConfig make_config(int d, int m, double beta, int s, int n_max,
                            std::uint64_t master_seed, double ceiling_clamp,
                            bool quorum_at_stop) {
    EstimatorConfig config;
    config.dimension = d;
    config.ensemble_size = m;
    config.quorum = beta;
    config.stability_window = s;
    config.max_steps = n_max;
    config.master_seed = master_seed;
    config.ceiling_clamp = ceiling_clamp;
    config.require_quorum_at_stop = quorum_at_stop;
    return config;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Projector-unitary iteration sums, sequential yes-no measurement "
              "simulation, and dimension estimation";
    m.attr("__version__") = kVersion;

    py::register_exception<InvalidInputError>(m, "InvalidInputError", PyExc_ValueError);
    py::register_exception<NumericFailureError>(m, "NumericFailureError", PyExc_ArithmeticError);

    m.def(
        "haar_unitary",
        [](int d, std::uint64_t seed, std::uint64_t stream) {
            return haar_unitary(d, SeedStream{seed, stream}).matrix();
        },
        py::arg("d"), py::arg("seed"), py::arg("stream") = 0,
        "Haar-distributed unitary matrix (Ginibre + QR with phase fix)");

    m.def(
        "haar_orthogonal",
        [](int d, std::uint64_t seed, std::uint64_t stream) {
            return haar_orthogonal(d, SeedStream{seed, stream}).matrix();
        },
        py::arg("d"), py::arg("seed"), py::arg("stream") = 0,
        "Haar-distributed real orthogonal matrix");

    m.def(
        "spectral_decomposition",
        [](const CMat& u, double cluster_tol) {
            const auto dec = spectral_decomposition(UnitaryMatrix(u), cluster_tol);
            py::list clusters;
            for (const auto& cluster : dec.clusters)
                clusters.append(py::make_tuple(cluster.eigenvalue, cluster.basis));
            return clusters;
        },
        py::arg("u"), py::arg("cluster_tol") = -1.0,
        "Clustered unit-circle eigendecomposition as [(eigenvalue, basis), ...]");

    m.def(
        "orthonormal_basis_of_span",
        [](const std::vector<CVec>& vectors, double tol) {
            return orthonormal_basis_of_span(vectors, tol);
        },
        py::arg("vectors"), py::arg("tol") = -1.0);

    m.def(
        "projector_matrix", [](const CVec& z) { return Projector(z).matrix(); }, py::arg("z"),
        "I - z z* for a unit vector z");

    m.def(
        "iterate_norms",
        [](const CMat& u, const CVec& z, double tail_tol, int max_steps) {
            const UnitaryMatrix uu(u);
            const auto series = iterate_norms(uu, default_z(z, uu.dim()), tail_tol, max_steps);
            py::dict out;
            out["norms_sq"] = series.norms_sq;
            out["partial_sums"] = series.partial_sums;
            out["truncation_reason"] = to_string(series.truncation_reason);
            out["contraction_radius"] = series.contraction_radius;
            return out;
        },
        py::arg("u"), py::arg("z") = CVec(), py::arg("tail_tol") = 1e-8,
        py::arg("max_steps") = 100000);

    m.def(
        "exact_sum_complex",
        [](const CMat& u, const CVec& z, double cluster_tol, double rank_tol) {
            const UnitaryMatrix uu(u);
            return report_to_dict(
                exact_sum_complex(uu, default_z(z, uu.dim()), cluster_tol, rank_tol));
        },
        py::arg("u"), py::arg("z") = CVec(), py::arg("cluster_tol") = -1.0,
        py::arg("rank_tol") = 1e-8,
        "Exact value of sum_n ||(PU)^n z||^2 with the per-eigenspace corrections");

    m.def(
        "exact_sum_real",
        [](const RMat& r, const RVec& z, double tol) {
            const OrthogonalMatrix rr(r);
            const RVec zz = z.size() == 0 ? RVec(RVec::Unit(rr.dim(), 0)) : z;
            return report_to_dict(exact_sum_real(rr, zz, tol));
        },
        py::arg("r"), py::arg("z") = RVec(), py::arg("tol") = 1e-8);

    m.def(
        "contraction_radius",
        [](const CMat& u, const CVec& z, double cluster_tol, double rank_tol) {
            const UnitaryMatrix uu(u);
            return contraction_radius(uu, default_z(z, uu.dim()),
                                      spectral_decomposition(uu, cluster_tol), rank_tol);
        },
        py::arg("u"), py::arg("z") = CVec(), py::arg("cluster_tol") = -1.0,
        py::arg("rank_tol") = 1e-8,
        "Spectral radius of PU compressed to the complement of the invariant part");

    m.def(
        "alpha_trace",
        [](const CMat& u, const CVec& z, int n) {
            const UnitaryMatrix uu(u);
            return alpha_trace(uu, default_z(z, uu.dim()), n);
        },
        py::arg("u"), py::arg("z"), py::arg("n"));

    m.def(
        "real_invariant_planes",
        [](const RMat& r, const RVec& z, double tol) {
            const auto rd = real_invariant_planes(OrthogonalMatrix(r), z, tol);
            py::list planes;
            for (const auto& plane : rd.planes) {
                py::dict entry;
                entry["x"] = plane.x;
                entry["y"] = plane.y;
                entry["angle"] = plane.angle;
                entry["contained_in_theta"] = plane.contained_in_theta;
                planes.append(entry);
            }
            py::dict out;
            out["w_plus"] = rd.w_plus;
            out["w_minus"] = rd.w_minus;
            out["planes"] = planes;
            return out;
        },
        py::arg("r"), py::arg("z"), py::arg("tol") = 1e-8);

    m.def(
        "theta_eigenspace_dim",
        [](const CMat& basis, const CVec& z, double tol) {
            return theta_eigenspace_dim(basis, z, tol);
        },
        py::arg("basis"), py::arg("z"), py::arg("tol") = 1e-8,
        "Dimension of the intersection of the z-orthogonal hyperplane with span(basis)");

    m.def(
        "string_probability",
        [](const CMat& u, const CVec& z, const std::string& symbols) {
            const UnitaryMatrix uu(u);
            return string_probability(MeasurementProcess(uu, default_z(z, uu.dim())), symbols);
        },
        py::arg("u"), py::arg("z"), py::arg("symbols"),
        "Joint probability of an outcome string under the sequential measurement");

    m.def(
        "all_ones_probability",
        [](const CMat& u, const CVec& z, int n) {
            const UnitaryMatrix uu(u);
            return all_ones_probability(MeasurementProcess(uu, default_z(z, uu.dim())), n);
        },
        py::arg("u"), py::arg("z"), py::arg("n"));

    m.def(
        "first_return_probability",
        [](const CMat& u, const CVec& z, int n) {
            const UnitaryMatrix uu(u);
            return first_return_probability(MeasurementProcess(uu, default_z(z, uu.dim())), n);
        },
        py::arg("u"), py::arg("z"), py::arg("n"));

    m.def(
        "mean_return_time",
        [](const CMat& u, const CVec& z, double tail_tol, int max_steps) {
            const UnitaryMatrix uu(u);
            const auto mrt =
                mean_return_time_series(MeasurementProcess(uu, default_z(z, uu.dim())), tail_tol,
                                        max_steps);
            return py::make_tuple(mrt.value, to_string(mrt.truncation_reason));
        },
        py::arg("u"), py::arg("z") = CVec(), py::arg("tail_tol") = 1e-8,
        py::arg("max_steps") = 100000);

    m.def(
        "markov_string_probability",
        [](const Eigen::Matrix2d& transition, const std::string& symbols) {
            return markov_string_probability(transition, symbols);
        },
        py::arg("transition"), py::arg("symbols"));

    m.def(
        "sample_outcomes",
        [](const CMat& u, const CVec& z, std::int64_t length, std::uint64_t seed,
           std::uint64_t stream) {
            const UnitaryMatrix uu(u);
            return sample_outcomes(MeasurementProcess(uu, default_z(z, uu.dim())), length,
                                   SeedStream{seed, stream})
                .symbols;
        },
        py::arg("u"), py::arg("z"), py::arg("length"), py::arg("seed"), py::arg("stream") = 0);

    m.def(
        "monte_carlo_return_time",
        [](const CMat& u, const CVec& z, std::int64_t returns, std::uint64_t seed,
           std::uint64_t stream, std::int64_t step_cap) {
            const UnitaryMatrix uu(u);
            const auto stats =
                monte_carlo_return_time(MeasurementProcess(uu, default_z(z, uu.dim())), returns,
                                        SeedStream{seed, stream}, step_cap);
            py::dict out;
            out["count"] = stats.count;
            out["mean"] = stats.mean;
            out["standard_error"] = stats.standard_error;
            out["steps_taken"] = stats.steps_taken;
            out["complete"] = stats.complete;
            out["samples"] = stats.samples;
            return out;
        },
        py::arg("u"), py::arg("z"), py::arg("returns"), py::arg("seed"), py::arg("stream") = 0,
        py::arg("step_cap") = 100000000);

    m.def(
        "d_lower",
        [](const CMat& u, const CVec& z, int steps, double ceiling_clamp) {
            const UnitaryMatrix uu(u);
            return d_lower(uu, default_z(z, uu.dim()), steps, ceiling_clamp);
        },
        py::arg("u"), py::arg("z"), py::arg("steps"), py::arg("ceiling_clamp") = 1e-9,
        "Integer lower bound ceil(S_N) for the dimension");

    m.def(
        "run_estimator",
        [](int d, int m_size, double beta, int s, int n_max, std::uint64_t seed,
           double ceiling_clamp, bool quorum_at_stop) {
            return estimator_result_to_dict(run_estimator(
                make_config(d, m_size, beta, s, n_max, seed, ceiling_clamp, quorum_at_stop)));
        },
        py::arg("d"), py::arg("M") = 100, py::arg("beta") = 0.5, py::arg("s") = 1,
        py::arg("n_max") = 100000, py::arg("seed") = 0, py::arg("ceiling_clamp") = 1e-9,
        py::arg("quorum_at_stop") = false,
        "Ensemble dimension estimate with the stability stopping rule");

    m.def(
        "experiment_sweep",
        [](int d_min, int d_max, int reps, int m_size, double beta, int s, int n_max,
           std::uint64_t seed, int threads) {
            const auto rows = experiment_sweep(
                d_min, d_max, reps, make_config(d_min, m_size, beta, s, n_max, seed, 1e-9, false),
                threads);
            py::list out;
            for (const auto& row : rows) {
                py::dict entry;
                entry["d"] = row.dimension;
                entry["rep"] = row.rep;
                entry["d_tilde"] = row.estimate;
                entry["N_tilde"] = row.stopping_step;
                entry["accuracy"] = row.correct ? 1.0 : 0.0;
                entry["steps_to_d"] = row.steps_to_d;
                entry["steps_to_half_d"] = row.steps_to_half_d;
                entry["stopped_by"] = to_string(row.stopped_by);
                out.append(entry);
            }
            return out;
        },
        py::arg("d_min"), py::arg("d_max"), py::arg("reps"), py::arg("M") = 100,
        py::arg("beta") = 0.5, py::arg("s") = 1, py::arg("n_max") = 100000, py::arg("seed") = 0,
        py::arg("threads") = 0);

    m.def("haversin", &haversin, py::arg("x"));
    m.def("havercosin", &havercosin, py::arg("x"));
    m.def(
        "qubit_p",
        [](double latitude, double longitude_difference) {
            return qubit_p(QubitParams{latitude, longitude_difference});
        },
        py::arg("latitude"), py::arg("longitude_difference"),
        "Return probability 1 - cos^2(latitude) * haversin(longitude difference)");
}
