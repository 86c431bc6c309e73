#pragma once

#include <vector>

#include "dimwitness/numerics.hpp"

namespace dimwitness {

// ---------------------------------------------------------------------------
// Projector onto the hyperplane orthogonal to a unit vector z

class Projector {
  public:
    // z must have norm within 1e-8 of 1 (it is renormalized exactly);
    // zero or non-finite input is rejected.
    explicit Projector(CVec z);

    const CVec& z() const noexcept { return z_; }
    Eigen::Index dim() const noexcept { return z_.size(); }

    // P v = v - z <z|v>.
    CVec apply(const CVec& v) const;
    // Materialized P = I - z z*.
    CMat matrix() const;

  private:
    CVec z_;
};

inline Projector projector(CVec z) { return Projector(std::move(z)); }

// ---------------------------------------------------------------------------
// Iteration of PU

enum class TruncationReason { TailBoundMet, MaxSteps };

const char* to_string(TruncationReason reason) noexcept;

// The squared norms a'_n = ||(PU)^n z||^2 together with their partial sums
// S_N = sum_{n<N} a'_n. norms_sq[0] is exactly 1; norms_sq is nonincreasing
// (||PU|| <= 1) and partial_sums never exceeds d.
struct IterateSeries {
    std::vector<double> norms_sq;      // a'_0 .. a'_{N-1}
    std::vector<double> partial_sums;  // partial_sums[k] = S_{k+1}
    TruncationReason truncation_reason = TruncationReason::MaxSteps;
    double contraction_radius = 1.0;

    double sum() const noexcept { return partial_sums.empty() ? 0.0 : partial_sums.back(); }
    Eigen::Index steps() const noexcept { return static_cast<Eigen::Index>(norms_sq.size()); }
};

// Iterates v <- PUv from v = z, recording squared norms, until the geometric
// tail bound r^{2N}/(1-r^2) with r = (1+rho)/2 drops below tail_tol (trusted
// only once the trailing norms themselves decay at rate r), or until
// max_steps. A non-contracting compression (rho >= 1 - 1e-12) is not an
// error; it is reported through truncation_reason = MaxSteps.
IterateSeries iterate_norms(const UnitaryMatrix& u, const CVec& z, double tail_tol = 1e-8,
                            int max_steps = 100000);

// ---------------------------------------------------------------------------
// Exact value of the series

// dim(Theta ^ V): the hyperplane Theta = z-perp meets the eigenspace spanned
// by `basis` (orthonormal columns) either fully or with codimension one,
// depending on whether z projects onto it by more than tol.
int theta_eigenspace_dim(const CMat& basis, const CVec& z, double tol = 1e-8);

struct EigenspaceIntersection {
    Complex eigenvalue;
    int dim_eigenspace = 0;
    int dim_theta_intersection = 0;
};

// Per-eigenspace intersection dimensions, dim W, the exact value of
// sum_n ||(PU)^n z||^2 = d - dim W, and the spectral radius of PU compressed
// to W-perp ^ Theta (strictly below 1 exactly when W exhausts the U-invariant
// directions inside Theta).
struct ExactSumReport {
    int dimension = 0;
    std::vector<EigenspaceIntersection> per_eigenspace;
    int dim_w = 0;
    int exact_sum = 0;
    double contraction_radius = 0.0;
};

ExactSumReport exact_sum_complex(const UnitaryMatrix& u, const CVec& z, double cluster_tol = -1.0,
                                 double rank_tol = 1e-8);

// Spectral radius of the compression of PU to W-perp ^ Theta, where W is the
// span of the Theta ^ V_lambda read off `dec`. Returns 0 on a trivial space.
double contraction_radius(const UnitaryMatrix& u, const CVec& z, const SpectralDecomposition& dec,
                          double rank_tol = 1e-8);

// alpha_n = tr((PU)^n (PU)^{*n}), a real in [0, d]. Decreases to dim W, and
// alpha_n - alpha_{n+1} = ||(PU)^n z||^2.
double alpha_trace(const UnitaryMatrix& u, const CVec& z, int n);

// ---------------------------------------------------------------------------
// Real (orthogonal) case

// A 2-D subspace on which R acts as a rotation by `angle`, spanned by the
// orthonormal pair (x, y). contained_in_theta records A ⊂ Theta, decided by
// ||P_A z|| <= tol.
struct InvariantPlane {
    RVec x;
    RVec y;
    double angle = 0.0;
    bool contained_in_theta = false;
};

struct RealDecomposition {
    RMat w_plus;   // orthonormal basis of Ker(R - I)
    RMat w_minus;  // orthonormal basis of Ker(R + I)
    std::vector<InvariantPlane> planes;
};

// Invariant-plane decomposition of an orthogonal map: complexifies R, pairs
// conjugate non-real eigenvalue clusters, extracts the real planes from
// complex eigenvectors (the real and imaginary parts are orthogonal and of
// equal norm; they are re-orthonormalized numerically), and collects the
// +/-1 eigenspaces.
RealDecomposition real_invariant_planes(const OrthogonalMatrix& r, const RVec& z,
                                        double tol = 1e-8);

// Real analogue of exact_sum_complex:
//   sum = d - dim(Theta ^ W_+1) - dim(Theta ^ W_-1) - 2 * #{planes inside Theta}.
ExactSumReport exact_sum_real(const OrthogonalMatrix& r, const RVec& z, double tol = 1e-8);

// ---------------------------------------------------------------------------
// Two-dimensional closed form (navigation parametrization)

struct QubitParams {
    double latitude = 0.0;              // radians
    double longitude_difference = 0.0;  // radians, [0, 2*pi)
};

double haversin(double x) noexcept;    // sin^2(x/2)
double havercosin(double x) noexcept;  // cos^2(x/2)

// p = 1 - cos^2(latitude) * haversin(longitude difference); the probability
// of an immediate return in the two-dimensional process.
double qubit_p(const QubitParams& params) noexcept;

} // namespace dimwitness
