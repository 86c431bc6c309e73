#include "dimwitness/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace dimwitness {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    state += kGolden;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t mix64(std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t state = a ^ (b * kGolden + 0x6A09E667F3BCC909ull);
    std::uint64_t out = splitmix64(state);
    return out ^ splitmix64(state);
}

std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

void check_finite(const CMat& m) {
    if (!m.allFinite()) throw InvalidInputError("matrix has non-finite entries");
}

} // namespace

// ---------------------------------------------------------------------------
// SeedStream / Rng

SeedStream SeedStream::substream(std::uint64_t index) const noexcept {
    return SeedStream{mix64(master_seed, stream_index), index};
}

Rng::Rng(const SeedStream& stream) noexcept {
    std::uint64_t state = mix64(stream.master_seed, stream.stream_index);
    for (auto& word : state_) word = splitmix64(state);
}

std::uint64_t Rng::next_u64() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // u1 in (0, 1] keeps the log finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

// ---------------------------------------------------------------------------
// Validated types

double unitarity_error(const CMat& m) {
    if (m.rows() != m.cols() || m.rows() == 0) return std::numeric_limits<double>::infinity();
    return (m.adjoint() * m - CMat::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

double orthogonality_error(const RMat& m) {
    if (m.rows() != m.cols() || m.rows() == 0) return std::numeric_limits<double>::infinity();
    return (m.transpose() * m - RMat::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

UnitaryMatrix::UnitaryMatrix(CMat matrix, double tol_unitarity)
    : matrix_(std::move(matrix)), tol_(tol_unitarity) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols())
        throw InvalidInputError("unitary matrix must be square and non-empty");
    if (tol_ < 0) throw InvalidInputError("tol_unitarity must be nonnegative");
    check_finite(matrix_);
    const double err = unitarity_error(matrix_);
    if (err > tol_)
        throw InvalidInputError("matrix is not unitary: ||U*U - I||_max = " + std::to_string(err) +
                                " exceeds tolerance " + std::to_string(tol_));
}

OrthogonalMatrix::OrthogonalMatrix(RMat matrix, double tol_orthogonality)
    : matrix_(std::move(matrix)), tol_(tol_orthogonality) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols())
        throw InvalidInputError("orthogonal matrix must be square and non-empty");
    if (tol_ < 0) throw InvalidInputError("tol_orthogonality must be nonnegative");
    if (!matrix_.allFinite()) throw InvalidInputError("matrix has non-finite entries");
    const double err = orthogonality_error(matrix_);
    if (err > tol_)
        throw InvalidInputError("matrix is not orthogonal: ||R^T R - I||_max = " +
                                std::to_string(err) + " exceeds tolerance " + std::to_string(tol_));
}

UnitaryMatrix complexify(const OrthogonalMatrix& r) {
    return UnitaryMatrix(r.matrix().cast<Complex>(), std::max(r.tol_orthogonality(), 1e-12));
}

// ---------------------------------------------------------------------------
// Haar sampling

UnitaryMatrix haar_unitary(int d, const SeedStream& stream) {
    if (d < 1) throw InvalidInputError("haar_unitary: dimension must be >= 1");
    Rng rng(stream);
    CMat ginibre(d, d);
    for (int col = 0; col < d; ++col)
        for (int row = 0; row < d; ++row) {
            const double re = rng.gaussian();
            const double im = rng.gaussian();
            ginibre(row, col) = Complex(re, im);
        }
    Eigen::HouseholderQR<CMat> qr(ginibre);
    CMat q = qr.householderQ() * CMat::Identity(d, d);
    const CMat& qr_packed = qr.matrixQR();
    for (int col = 0; col < d; ++col) {
        const Complex r_diag = qr_packed(col, col);
        const double mag = std::abs(r_diag);
        q.col(col) *= (mag > 0) ? r_diag / mag : Complex(1.0, 0.0);
    }
    return UnitaryMatrix(std::move(q), 1e-12);
}

OrthogonalMatrix haar_orthogonal(int d, const SeedStream& stream) {
    if (d < 1) throw InvalidInputError("haar_orthogonal: dimension must be >= 1");
    Rng rng(stream);
    RMat ginibre(d, d);
    for (int col = 0; col < d; ++col)
        for (int row = 0; row < d; ++row) ginibre(row, col) = rng.gaussian();
    Eigen::HouseholderQR<RMat> qr(ginibre);
    RMat q = qr.householderQ() * RMat::Identity(d, d);
    const RMat& qr_packed = qr.matrixQR();
    for (int col = 0; col < d; ++col)
        if (qr_packed(col, col) < 0) q.col(col) = -q.col(col);
    return OrthogonalMatrix(std::move(q), 1e-12);
}

// ---------------------------------------------------------------------------
// Spectral decomposition

namespace {

double arc_distance(double phase_a, double phase_b) noexcept {
    double diff = std::fmod(std::abs(phase_a - phase_b), 2.0 * std::numbers::pi);
    return std::min(diff, 2.0 * std::numbers::pi - diff);
}

// Single-linkage clustering of points on the circle: sort by phase, cut at
// every gap exceeding the threshold, and join the ends across the wrap if
// their gap is within it.
std::vector<std::vector<int>> cluster_phases(const std::vector<double>& phases, double tol) {
    const int n = static_cast<int>(phases.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return phases[a] < phases[b]; });

    std::vector<std::vector<int>> groups;
    for (int k = 0; k < n; ++k) {
        const int idx = order[k];
        if (k == 0 || arc_distance(phases[idx], phases[order[k - 1]]) > tol)
            groups.emplace_back();
        groups.back().push_back(idx);
    }
    if (groups.size() > 1 &&
        arc_distance(phases[order.front()], phases[order.back()]) <= tol) {
        auto& first = groups.front();
        first.insert(first.end(), groups.back().begin(), groups.back().end());
        groups.pop_back();
    }
    return groups;
}

} // namespace

SpectralDecomposition spectral_decomposition(const UnitaryMatrix& u, double cluster_tol) {
    const Eigen::Index d = u.dim();
    if (cluster_tol <= 0) cluster_tol = 1e-8 * static_cast<double>(d);

    // For a normal matrix the Schur form is diagonal up to roundoff, so the
    // Schur vectors are an exactly orthonormal eigenbasis.
    Eigen::ComplexSchur<CMat> schur(u.matrix(), /*computeU=*/true);
    if (schur.info() != Eigen::Success)
        throw NumericFailureError("spectral_decomposition: Schur iteration did not converge");

    const CMat& t = schur.matrixT();
    const CMat& q = schur.matrixU();

    std::vector<double> phases(d);
    std::vector<Complex> eigenvalues(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        Complex lambda = t(i, i);
        const double mag = std::abs(lambda);
        if (std::abs(mag - 1.0) > 1e-6)
            throw NumericFailureError("spectral_decomposition: eigenvalue off the unit circle",
                                      std::abs(mag - 1.0));
        eigenvalues[i] = (mag > 0) ? lambda / mag : Complex(1.0, 0.0);
        phases[i] = std::arg(eigenvalues[i]);
    }

    SpectralDecomposition dec;
    dec.cluster_tol = cluster_tol;
    dec.dimension = d;

    for (const auto& members : cluster_phases(phases, cluster_tol)) {
        const auto k = static_cast<Eigen::Index>(members.size());
        CMat block(d, k);
        Complex mean = Complex(0.0, 0.0);
        for (Eigen::Index j = 0; j < k; ++j) {
            block.col(j) = q.col(members[j]);
            mean += eigenvalues[members[j]];
        }
        Complex rep = (std::abs(mean) > 1e-3) ? mean / std::abs(mean) : eigenvalues[members[0]];

        // Re-orthonormalize within the cluster (the Schur columns already are;
        // this keeps the contract independent of the solver).
        Eigen::HouseholderQR<CMat> qr(block);
        CMat basis = qr.householderQ() * CMat::Identity(d, k);

        dec.clusters.push_back(EigenspaceCluster{rep, std::move(basis)});
    }

    // Eigenvector residual against the cluster representative.
    double max_residual = 0.0;
    for (const auto& cluster : dec.clusters) {
        const CMat residual =
            u.matrix() * cluster.basis - cluster.eigenvalue * cluster.basis;
        max_residual = std::max(max_residual, residual.colwise().norm().maxCoeff());
    }
    if (max_residual > 10.0 * cluster_tol)
        throw NumericFailureError(
            "spectral_decomposition: eigenvector residual exceeds 10 * cluster_tol",
            max_residual);

    return dec;
}

// ---------------------------------------------------------------------------
// Orthonormalization

namespace {

// Modified Gram-Schmidt with one re-orthogonalization pass.
template <typename Mat, typename Vec>
Mat gram_schmidt(const std::vector<Vec>& vectors, double tol) {
    if (vectors.empty()) return Mat(0, 0);
    const Eigen::Index d = vectors.front().size();
    double max_norm = 0.0;
    for (const auto& v : vectors) {
        if (v.size() != d)
            throw InvalidInputError("orthonormal_basis_of_span: mixed vector dimensions");
        if (!v.allFinite())
            throw InvalidInputError("orthonormal_basis_of_span: non-finite entries");
        max_norm = std::max(max_norm, v.norm());
    }
    if (tol <= 0) tol = 1e-9 * std::max(max_norm, 1.0);

    Mat basis(d, static_cast<Eigen::Index>(vectors.size()));
    Eigen::Index rank = 0;
    for (const auto& v : vectors) {
        Vec w = v;
        for (int pass = 0; pass < 2; ++pass)
            if (rank > 0) w -= basis.leftCols(rank) * (basis.leftCols(rank).adjoint() * w);
        const double norm = w.norm();
        if (norm > tol) basis.col(rank++) = w / norm;
    }
    return basis.leftCols(rank);
}

} // namespace

CMat orthonormal_basis_of_span(const std::vector<CVec>& vectors, double tol) {
    return gram_schmidt<CMat, CVec>(vectors, tol);
}

RMat orthonormal_basis_of_span_real(const std::vector<RVec>& vectors, double tol) {
    return gram_schmidt<RMat, RVec>(vectors, tol);
}

} // namespace dimwitness
