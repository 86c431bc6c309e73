#include "dimwitness/witness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dimwitness {

namespace {

// Orthonormal complement of a single coefficient vector inside C^k (resp.
// R^k): the Householder Q of c has c/||c|| as its first column, so the
// remaining columns span its orthogonal complement.
template <typename Mat, typename Vec>
Mat complement_within(const Vec& c) {
    const Eigen::Index k = c.size();
    Eigen::HouseholderQR<Mat> qr(c);
    Mat full = qr.householderQ() * Mat::Identity(k, k);
    return full.rightCols(k - 1);
}

// Basis of Theta ^ span(basis): the whole space when z projects below tol,
// else the kernel of the functional v -> <z|v> restricted to it.
template <typename Mat, typename Vec>
Mat theta_intersection_basis(const Mat& basis, const Vec& z, double tol) {
    const Vec coeffs = basis.adjoint() * z;
    if (coeffs.norm() <= tol) return basis;
    const Eigen::Index k = basis.cols();
    if (k == 1) return Mat(basis.rows(), 0);
    return basis * complement_within<Mat, Vec>(coeffs);
}

// Spectral radius of PU compressed to (W + span z)-perp = W-perp ^ Theta.
double compression_spectral_radius(const CMat& u, const CVec& z, const CMat& w_basis) {
    const Eigen::Index d = z.size();
    const Eigen::Index comp_dim = d - w_basis.cols() - 1;
    if (comp_dim <= 0) return 0.0;

    CMat pinned(d, w_basis.cols() + 1);
    pinned.leftCols(w_basis.cols()) = w_basis;
    pinned.col(w_basis.cols()) = z;
    Eigen::HouseholderQR<CMat> qr(pinned);
    const CMat q = qr.householderQ() * CMat::Identity(d, d);
    const CMat b = q.rightCols(comp_dim);

    CMat pub = u * b;
    pub -= z * (z.adjoint() * pub);
    const CMat compressed = b.adjoint() * pub;

    Eigen::ComplexEigenSolver<CMat> solver(compressed, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericFailureError("contraction_radius: eigensolver did not converge");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

struct IntersectionScan {
    std::vector<EigenspaceIntersection> per_eigenspace;
    CMat w_basis;
    int dim_w = 0;
};

IntersectionScan scan_intersections(const SpectralDecomposition& dec, const CVec& z,
                                    double rank_tol) {
    IntersectionScan scan;
    const Eigen::Index d = z.size();
    scan.w_basis = CMat(d, 0);
    for (const auto& cluster : dec.clusters) {
        const CMat block = theta_intersection_basis<CMat, CVec>(cluster.basis, z, rank_tol);
        scan.per_eigenspace.push_back(
            EigenspaceIntersection{cluster.eigenvalue, static_cast<int>(cluster.multiplicity()),
                                   static_cast<int>(block.cols())});
        if (block.cols() > 0) {
            CMat grown(d, scan.w_basis.cols() + block.cols());
            grown.leftCols(scan.w_basis.cols()) = scan.w_basis;
            grown.rightCols(block.cols()) = block;
            scan.w_basis = std::move(grown);
        }
        scan.dim_w += static_cast<int>(block.cols());
    }
    return scan;
}

} // namespace

// ---------------------------------------------------------------------------
// Projector

Projector::Projector(CVec z) : z_(std::move(z)) {
    if (z_.size() == 0) throw InvalidInputError("projector: empty vector");
    if (!z_.allFinite()) throw InvalidInputError("projector: non-finite vector");
    const double norm = z_.norm();
    if (norm == 0.0) throw InvalidInputError("projector: zero vector");
    if (std::abs(norm - 1.0) > 1e-8)
        throw InvalidInputError("projector: vector norm " + std::to_string(norm) +
                                " is not within 1e-8 of 1");
    z_ /= norm;
}

CVec Projector::apply(const CVec& v) const { return v - z_ * z_.dot(v); }

CMat Projector::matrix() const {
    return CMat::Identity(z_.size(), z_.size()) - z_ * z_.adjoint();
}

// ---------------------------------------------------------------------------
// Iteration

const char* to_string(TruncationReason reason) noexcept {
    return reason == TruncationReason::TailBoundMet ? "tail-bound-met" : "max-steps";
}

namespace {

// Tail bound a_{N-1} * r^2/(1 - r^2), with the observed last norm as the
// prefactor; valid once the decay has genuinely reached rate r^2, so it is
// trusted only after the trailing ratios contract at that rate.
bool tail_bound_met(const std::vector<double>& norms_sq, double r, double tail_tol) {
    const std::size_t n = norms_sq.size();
    if (n < 2) return false;
    if (norms_sq.back() < 1e-200) return true;  // tail invisible at double precision
    const double r_sq = r * r;
    const std::size_t guard = std::min<std::size_t>(3, n - 1);
    for (std::size_t j = n - guard; j < n; ++j)
        if (norms_sq[j] > r_sq * norms_sq[j - 1] * (1.0 + 1e-12)) return false;
    return norms_sq.back() * r_sq / (1.0 - r_sq) < tail_tol;
}

} // namespace

IterateSeries iterate_norms(const UnitaryMatrix& u, const CVec& z_in, double tail_tol,
                            int max_steps) {
    if (tail_tol <= 0) throw InvalidInputError("iterate_norms: tail_tol must be positive");
    if (max_steps < 1) throw InvalidInputError("iterate_norms: max_steps must be >= 1");
    const Projector proj(z_in);
    if (proj.dim() != u.dim()) throw InvalidInputError("iterate_norms: dimension mismatch");
    const CVec& z = proj.z();

    IterateSeries series;
    series.contraction_radius = contraction_radius(u, z, spectral_decomposition(u));
    series.norms_sq.push_back(1.0);
    series.partial_sums.push_back(1.0);
    series.truncation_reason = TruncationReason::MaxSteps;

    const bool contracting = series.contraction_radius < 1.0 - 1e-12;
    const double r = 0.5 * (1.0 + series.contraction_radius);

    CVec v = z;
    double sum = 1.0;
    for (int n = 1; n < max_steps; ++n) {
        v = proj.apply(u.matrix() * v);
        const double norm_sq = v.squaredNorm();
        sum += norm_sq;
        series.norms_sq.push_back(norm_sq);
        series.partial_sums.push_back(sum);
        if (norm_sq == 0.0) {
            // The iterate vanished; the remaining tail is exactly zero.
            series.truncation_reason = TruncationReason::TailBoundMet;
            break;
        }
        if (contracting && tail_bound_met(series.norms_sq, r, tail_tol)) {
            series.truncation_reason = TruncationReason::TailBoundMet;
            break;
        }
    }
    return series;
}

// ---------------------------------------------------------------------------
// Exact sum

int theta_eigenspace_dim(const CMat& basis, const CVec& z, double tol) {
    if (basis.rows() != z.size())
        throw InvalidInputError("theta_eigenspace_dim: dimension mismatch");
    const double projection_norm = (basis.adjoint() * z).norm();
    const int k = static_cast<int>(basis.cols());
    return projection_norm > tol ? k - 1 : k;
}

double contraction_radius(const UnitaryMatrix& u, const CVec& z, const SpectralDecomposition& dec,
                          double rank_tol) {
    const Projector proj(z);
    if (proj.dim() != u.dim() || dec.dimension != u.dim())
        throw InvalidInputError("contraction_radius: dimension mismatch");
    const IntersectionScan scan = scan_intersections(dec, proj.z(), rank_tol);
    return compression_spectral_radius(u.matrix(), proj.z(), scan.w_basis);
}

ExactSumReport exact_sum_complex(const UnitaryMatrix& u, const CVec& z_in, double cluster_tol,
                                 double rank_tol) {
    const Projector proj(z_in);
    if (proj.dim() != u.dim()) throw InvalidInputError("exact_sum_complex: dimension mismatch");
    const CVec& z = proj.z();

    const SpectralDecomposition dec = spectral_decomposition(u, cluster_tol);
    IntersectionScan scan = scan_intersections(dec, z, rank_tol);

    ExactSumReport report;
    report.dimension = static_cast<int>(u.dim());
    report.per_eigenspace = std::move(scan.per_eigenspace);
    report.dim_w = scan.dim_w;
    report.exact_sum = report.dimension - scan.dim_w;
    report.contraction_radius = compression_spectral_radius(u.matrix(), z, scan.w_basis);
    return report;
}

double alpha_trace(const UnitaryMatrix& u, const CVec& z_in, int n) {
    if (n < 0) throw InvalidInputError("alpha_trace: n must be nonnegative");
    const Projector proj(z_in);
    if (proj.dim() != u.dim()) throw InvalidInputError("alpha_trace: dimension mismatch");
    const Eigen::Index d = u.dim();
    if (n == 0) return static_cast<double>(d);

    CMat base = u.matrix() - proj.z() * (proj.z().adjoint() * u.matrix());  // P U
    CMat power = CMat::Identity(d, d);
    int exponent = n;
    while (exponent > 0) {
        if (exponent & 1) power = power * base;
        exponent >>= 1;
        if (exponent > 0) base = base * base;
    }
    // tr(M M*) is the squared Frobenius norm.
    return power.squaredNorm();
}

// ---------------------------------------------------------------------------
// Real case

namespace {

RVec check_real_unit(const RVec& z) {
    if (z.size() == 0 || !z.allFinite()) throw InvalidInputError("invalid real vector");
    const double norm = z.norm();
    if (norm == 0.0) throw InvalidInputError("zero vector");
    if (std::abs(norm - 1.0) > 1e-8)
        throw InvalidInputError("vector norm " + std::to_string(norm) +
                                " is not within 1e-8 of 1");
    return z / norm;
}

double plane_projection_norm(const InvariantPlane& plane, const RVec& z) {
    return std::hypot(plane.x.dot(z), plane.y.dot(z));
}

} // namespace

RealDecomposition real_invariant_planes(const OrthogonalMatrix& r, const RVec& z_in, double tol) {
    const RVec z = check_real_unit(z_in);
    if (z.size() != r.dim()) throw InvalidInputError("real_invariant_planes: dimension mismatch");
    const Eigen::Index d = r.dim();

    const UnitaryMatrix complexified = complexify(r);
    const SpectralDecomposition dec = spectral_decomposition(complexified);
    const double axis_tol = std::max(0.25 * dec.cluster_tol, 1e-12);

    RealDecomposition result;
    std::vector<RVec> plus_candidates;
    std::vector<RVec> minus_candidates;
    Eigen::Index real_multiplicity = 0;

    for (const auto& cluster : dec.clusters) {
        if (std::abs(cluster.eigenvalue.imag()) <= axis_tol) {
            auto& sink = cluster.eigenvalue.real() > 0 ? plus_candidates : minus_candidates;
            for (Eigen::Index j = 0; j < cluster.multiplicity(); ++j) {
                sink.push_back(cluster.basis.col(j).real());
                sink.push_back(cluster.basis.col(j).imag());
            }
            real_multiplicity += cluster.multiplicity();
            continue;
        }
        if (cluster.eigenvalue.imag() < 0) continue;  // handled through its conjugate partner

        // Locate the conjugate cluster; its existence is part of being the
        // spectrum of a real matrix.
        const Complex conjugate = std::conj(cluster.eigenvalue);
        bool partner_found = false;
        for (const auto& other : dec.clusters) {
            if (std::abs(other.eigenvalue - conjugate) <= 10.0 * dec.cluster_tol &&
                other.multiplicity() == cluster.multiplicity() && other.eigenvalue.imag() < 0) {
                partner_found = true;
                break;
            }
        }
        if (!partner_found)
            throw NumericFailureError(
                "real_invariant_planes: unpaired non-real eigenvalue cluster",
                std::abs(cluster.eigenvalue.imag()));

        const double angle = std::abs(std::arg(cluster.eigenvalue));
        for (Eigen::Index j = 0; j < cluster.multiplicity(); ++j) {
            const CVec v = cluster.basis.col(j);
            // For non-real eigenvalues of a real matrix, Re v and Im v are
            // orthogonal with equal norms 1/sqrt(2); re-orthonormalize anyway.
            InvariantPlane plane;
            plane.x = std::numbers::sqrt2 * v.real();
            plane.y = std::numbers::sqrt2 * v.imag();
            const double nx = plane.x.norm();
            if (nx < 1e-8)
                throw NumericFailureError("real_invariant_planes: degenerate plane vector", nx);
            plane.x /= nx;
            plane.y -= plane.x * plane.x.dot(plane.y);
            const double ny = plane.y.norm();
            if (ny < 1e-8)
                throw NumericFailureError("real_invariant_planes: degenerate plane vector", ny);
            plane.y /= ny;
            plane.angle = angle;
            plane.contained_in_theta = plane_projection_norm(plane, z) <= tol;
            result.planes.push_back(std::move(plane));
        }
    }

    result.w_plus = orthonormal_basis_of_span_real(plus_candidates);
    result.w_minus = orthonormal_basis_of_span_real(minus_candidates);

    if (result.w_plus.cols() + result.w_minus.cols() != real_multiplicity)
        throw NumericFailureError("real_invariant_planes: real eigenspace extraction lost rank");
    if (result.w_plus.cols() + result.w_minus.cols() +
            2 * static_cast<Eigen::Index>(result.planes.size()) != d)
        throw NumericFailureError("real_invariant_planes: decomposition does not fill R^d");

    return result;
}

ExactSumReport exact_sum_real(const OrthogonalMatrix& r, const RVec& z_in, double tol) {
    const RVec z = check_real_unit(z_in);
    if (z.size() != r.dim()) throw InvalidInputError("exact_sum_real: dimension mismatch");
    const Eigen::Index d = r.dim();

    const RealDecomposition rd = real_invariant_planes(r, z, tol);

    ExactSumReport report;
    report.dimension = static_cast<int>(d);

    // Complexified basis of W, assembled from the real pieces: the
    // eigenspace intersections plus (x +- i y)/sqrt(2) for contained planes.
    std::vector<CVec> w_columns;
    auto add_axis_part = [&](const RMat& basis, Complex eigenvalue) {
        if (basis.cols() == 0) return;
        const RMat block = theta_intersection_basis<RMat, RVec>(basis, z, tol);
        report.per_eigenspace.push_back(EigenspaceIntersection{
            eigenvalue, static_cast<int>(basis.cols()), static_cast<int>(block.cols())});
        for (Eigen::Index j = 0; j < block.cols(); ++j)
            w_columns.push_back(block.col(j).cast<Complex>());
        report.dim_w += static_cast<int>(block.cols());
    };
    add_axis_part(rd.w_plus, Complex(1.0, 0.0));
    add_axis_part(rd.w_minus, Complex(-1.0, 0.0));

    int contained_planes = 0;
    for (const auto& plane : rd.planes) {
        const int flag = plane.contained_in_theta ? 1 : 0;
        const Complex lambda = std::polar(1.0, plane.angle);
        report.per_eigenspace.push_back(EigenspaceIntersection{lambda, 1, flag});
        report.per_eigenspace.push_back(EigenspaceIntersection{std::conj(lambda), 1, flag});
        if (plane.contained_in_theta) {
            ++contained_planes;
            const CVec xc = plane.x.cast<Complex>();
            const CVec yc = plane.y.cast<Complex>();
            w_columns.push_back((xc + Complex(0.0, 1.0) * yc) / std::numbers::sqrt2);
            w_columns.push_back((xc - Complex(0.0, 1.0) * yc) / std::numbers::sqrt2);
        }
    }
    report.dim_w += 2 * contained_planes;
    report.exact_sum = report.dimension - report.dim_w;

    CMat w_basis(d, static_cast<Eigen::Index>(w_columns.size()));
    for (std::size_t j = 0; j < w_columns.size(); ++j)
        w_basis.col(static_cast<Eigen::Index>(j)) = w_columns[j];
    report.contraction_radius =
        compression_spectral_radius(r.matrix().cast<Complex>(), z.cast<Complex>(), w_basis);
    return report;
}

// ---------------------------------------------------------------------------
// Two-dimensional closed form

double haversin(double x) noexcept {
    const double s = std::sin(0.5 * x);
    return s * s;
}

double havercosin(double x) noexcept {
    const double c = std::cos(0.5 * x);
    return c * c;
}

double qubit_p(const QubitParams& params) noexcept {
    const double c = std::cos(params.latitude);
    return 1.0 - c * c * haversin(params.longitude_difference);
}

} // namespace dimwitness
