#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dimwitness/errors.hpp"

namespace dimwitness {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kDefaultUnitarityTol = 1e-10;

// ---------------------------------------------------------------------------
// Seeded randomness

// Identifies one reproducible random stream. Equal (master_seed, stream_index)
// pairs yield bit-identical sequences across runs and platforms; distinct
// stream indices yield statistically independent streams.
struct SeedStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;

    // Child stream family rooted at this stream; chaining substreams keeps
    // the families disjoint.
    [[nodiscard]] SeedStream substream(std::uint64_t index) const noexcept;
};

// xoshiro256++ seeded via splitmix64. Fully specified bit-for-bit, unlike the
// standard library's distributions, so SeedStream's determinism contract
// holds across standard libraries.
class Rng {
  public:
    explicit Rng(const SeedStream& stream) noexcept;

    std::uint64_t next_u64() noexcept;
    // Uniform on [0, 1), 53-bit resolution.
    double uniform() noexcept;
    // Standard normal via Box-Muller.
    double gaussian() noexcept;

  private:
    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// ---------------------------------------------------------------------------
// Validated matrix types

// d x d complex matrix with ||U*U - I||_max <= tol_unitarity.
class UnitaryMatrix {
  public:
    explicit UnitaryMatrix(CMat matrix, double tol_unitarity = kDefaultUnitarityTol);

    const CMat& matrix() const noexcept { return matrix_; }
    Eigen::Index dim() const noexcept { return matrix_.rows(); }
    double tol_unitarity() const noexcept { return tol_; }

  private:
    CMat matrix_;
    double tol_;
};

// d x d real matrix with ||R^T R - I||_max <= tol_orthogonality.
class OrthogonalMatrix {
  public:
    explicit OrthogonalMatrix(RMat matrix, double tol_orthogonality = kDefaultUnitarityTol);

    const RMat& matrix() const noexcept { return matrix_; }
    Eigen::Index dim() const noexcept { return matrix_.rows(); }
    double tol_orthogonality() const noexcept { return tol_; }

  private:
    RMat matrix_;
    double tol_;
};

// Max-norm deviation of M*M from the identity; the quantity the validated
// types bound.
double unitarity_error(const CMat& m);
double orthogonality_error(const RMat& m);

// View a real orthogonal map as a unitary on C^d.
UnitaryMatrix complexify(const OrthogonalMatrix& r);

// ---------------------------------------------------------------------------
// Spectral decomposition

// One cluster of near-equal unit-circle eigenvalues together with an
// orthonormal basis (columns) of the direct sum of their eigenspaces.
struct EigenspaceCluster {
    Complex eigenvalue;
    CMat basis;

    Eigen::Index multiplicity() const noexcept { return basis.cols(); }
};

struct SpectralDecomposition {
    std::vector<EigenspaceCluster> clusters;
    double cluster_tol = 0.0;
    Eigen::Index dimension = 0;
};

// Full eigendecomposition of a unitary map. Eigenvalues are projected onto
// the unit circle and grouped by single-linkage clustering at arc distance
// cluster_tol (default 1e-8 * d); per-cluster bases are re-orthonormalized.
// The union of the bases spans C^d. Throws NumericFailureError, carrying the
// residual, if the eigensolver fails or the clusters cannot meet the
// ||U v - lambda v|| <= 10 * cluster_tol contract.
SpectralDecomposition spectral_decomposition(const UnitaryMatrix& u, double cluster_tol = -1.0);

// ---------------------------------------------------------------------------
// Sampling and orthonormalization

// Haar-distributed unitary: complex Ginibre draw, QR factorization, columns
// rescaled by the phases of diag(R) so the distribution is exactly Haar
// rather than QR-biased.
UnitaryMatrix haar_unitary(int d, const SeedStream& stream);

// Haar-distributed real orthogonal matrix (real Ginibre + QR + sign fix).
OrthogonalMatrix haar_orthogonal(int d, const SeedStream& stream);

// Orthonormal basis (columns) of span{vectors}. Vectors whose residual after
// projection onto the running basis is <= tol are dropped; tol <= 0 selects
// 1e-9 * (largest input norm). Empty input yields a 0 x 0 matrix.
CMat orthonormal_basis_of_span(const std::vector<CVec>& vectors, double tol = -1.0);

// Real counterpart, same dropping rule.
RMat orthonormal_basis_of_span_real(const std::vector<RVec>& vectors, double tol = -1.0);

} // namespace dimwitness
