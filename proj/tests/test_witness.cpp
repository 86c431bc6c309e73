#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dimwitness/witness.hpp"
#include "support/oracles.hpp"

using namespace dimwitness;
using oracle::brute_force_iterate_norm;
using oracle::brute_force_partial_sum;

namespace {

CVec random_unit(int d, std::uint64_t seed) {
    Rng rng(SeedStream{seed, 0});
    CVec z(d);
    for (int i = 0; i < d; ++i) z(i) = Complex(rng.gaussian(), rng.gaussian());
    return z / z.norm();
}

} // namespace

TEST_CASE("projector") {
    SUBCASE("z = e1 in d = 2") {
        const Projector p(CVec::Unit(2, 0));
        CMat expected(2, 2);
        expected << Complex(0, 0), Complex(0, 0), Complex(0, 0), Complex(1, 0);
        CHECK((p.matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("z = (1,1)/sqrt(2)") {
        CVec z(2);
        z << Complex(1, 0), Complex(1, 0);
        const Projector p(z / std::numbers::sqrt2);
        CMat expected(2, 2);
        expected << Complex(0.5, 0), Complex(-0.5, 0), Complex(-0.5, 0), Complex(0.5, 0);
        CHECK((p.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("idempotent, hermitian, annihilates z") {
        const Projector p(random_unit(5, 3));
        const CMat m = p.matrix();
        CHECK((m * m - m).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(p.apply(p.z()).norm() < 1e-10);
    }
    SUBCASE("rejects bad vectors") {
        CHECK_THROWS_AS((void)Projector(CVec::Zero(3)), InvalidInputError);
        CHECK_THROWS_AS((void)Projector(0.9 * CVec::Unit(3, 0)), InvalidInputError);
        CVec nan_vec = CVec::Unit(2, 0);
        nan_vec(1) = Complex(std::nan(""), 0.0);
        CHECK_THROWS_AS((void)Projector(nan_vec), InvalidInputError);
    }
}

TEST_CASE("iterate_norms") {
    SUBCASE("qubit closed form a_n = (1-p) p^{n-1}") {
        const double phi = 0.9;
        const UnitaryMatrix u(oracle::rotation2(phi).cast<Complex>());
        const CVec z = CVec::Unit(2, 0);
        const double p = std::norm(z.dot(u.matrix() * z));
        const auto series = iterate_norms(u, z, 1e-30, 40);
        REQUIRE(series.steps() == 40);
        for (int n = 1; n < 40; ++n)
            CHECK(series.norms_sq[n] == doctest::Approx(oracle::qubit_a(p, n)).epsilon(1e-12));
    }
    SUBCASE("identity truncates immediately with an exactly zero tail") {
        const auto series = iterate_norms(UnitaryMatrix(CMat::Identity(4, 4)), CVec::Unit(4, 0));
        REQUIRE(series.norms_sq.size() == 2);
        CHECK(series.norms_sq[0] == 1.0);
        CHECK(series.norms_sq[1] == 0.0);
        CHECK(series.partial_sums.back() == 1.0);
        CHECK(series.truncation_reason == TruncationReason::TailBoundMet);
    }
    SUBCASE("S_200 approaches d = 3 and matches the brute-force oracle") {
        const auto u = haar_unitary(3, SeedStream{11, 0});
        const CVec z = CVec::Unit(3, 0);
        const auto series = iterate_norms(u, z, 1e-30, 200);
        REQUIRE(series.steps() == 200);
        CHECK(series.sum() == doctest::Approx(3.0).epsilon(1e-6));
        CHECK(series.sum() ==
              doctest::Approx(brute_force_partial_sum(u.matrix(), z, 200)).epsilon(1e-12));
    }
    SUBCASE("tail-bound truncation is accurate to the advertised tolerance") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const int d = 2 + static_cast<int>(seed % 7);
            const auto u = haar_unitary(d, SeedStream{200 + seed, 0});
            const CVec z = random_unit(d, 300 + seed);
            const auto series = iterate_norms(u, z, 1e-8);
            const auto report = exact_sum_complex(u, z);
            REQUIRE(series.truncation_reason == TruncationReason::TailBoundMet);
            CHECK(series.sum() == doctest::Approx(report.exact_sum).epsilon(1e-6));
        }
    }
    SUBCASE("monotonicity: norms nonincreasing, sums nondecreasing and bounded by d") {
        const int d = 6;
        const auto u = haar_unitary(d, SeedStream{17, 0});
        const auto series = iterate_norms(u, random_unit(d, 18), 1e-10);
        for (std::size_t n = 1; n < series.norms_sq.size(); ++n) {
            CHECK(series.norms_sq[n] <= series.norms_sq[n - 1] + 1e-12);
            CHECK(series.partial_sums[n] >= series.partial_sums[n - 1] - 1e-12);
        }
        CHECK(series.partial_sums.back() <= d + 1e-6);
    }
    SUBCASE("invalid arguments") {
        const UnitaryMatrix u(CMat::Identity(2, 2));
        CHECK_THROWS_AS(iterate_norms(u, CVec::Unit(2, 0), -1.0), InvalidInputError);
        CHECK_THROWS_AS(iterate_norms(u, CVec::Unit(3, 0)), InvalidInputError);
    }
}

TEST_CASE("theta_eigenspace_dim") {
    CMat v23(3, 2);
    v23.col(0) = CVec::Unit(3, 1);
    v23.col(1) = CVec::Unit(3, 2);
    CHECK(theta_eigenspace_dim(v23, CVec::Unit(3, 0)) == 2);

    CMat v1 = CVec::Unit(3, 0);
    CHECK(theta_eigenspace_dim(v1, CVec::Unit(3, 0)) == 0);

    CMat v12(3, 2);
    v12.col(0) = CVec::Unit(3, 0);
    v12.col(1) = CVec::Unit(3, 1);
    const CVec diag = (CVec::Unit(3, 0) + CVec::Unit(3, 1)) / std::numbers::sqrt2;
    CHECK(theta_eigenspace_dim(v12, diag) == 1);
}

TEST_CASE("exact_sum_complex") {
    SUBCASE("z an eigenvector gives 1") {
        CMat u = CMat::Zero(3, 3);
        u(0, 0) = Complex(1, 0);
        u(1, 1) = Complex(0, 1);
        u(2, 2) = Complex(-1, 0);
        const auto report = exact_sum_complex(UnitaryMatrix(u), CVec::Unit(3, 0));
        CHECK(report.exact_sum == 1);
        CHECK(report.dim_w == 2);
    }
    SUBCASE("rotation block plus identity block gives 2") {
        const RMat r = oracle::embedded_rotation(4, 0, 1, std::numbers::pi / 5.0);
        const UnitaryMatrix u(r.cast<Complex>());
        const CVec z = CVec::Unit(4, 0);
        const auto report = exact_sum_complex(u, z);
        CHECK(report.exact_sum == 2);
        // Brute-force partial sums converge to the same value.
        CHECK(brute_force_partial_sum(u.matrix(), z, 500) ==
              doctest::Approx(2.0).epsilon(1e-6));
    }
    SUBCASE("d = 2 rotation with Uz != z gives 2") {
        const UnitaryMatrix u(oracle::rotation2(0.7).cast<Complex>());
        CHECK(exact_sum_complex(u, CVec::Unit(2, 0)).exact_sum == 2);
    }
    SUBCASE("degenerate eigenvalue with z partly inside it") {
        // V_1 = span{e1, e2} is two-dimensional; z leans into it and into
        // the third eigenspace, so both intersections lose one dimension.
        CMat u = CMat::Identity(3, 3);
        u(2, 2) = Complex(0, 1);
        CVec z(3);
        z << Complex(1, 0), Complex(0, 0), Complex(1, 0);
        z /= std::numbers::sqrt2;
        const auto report = exact_sum_complex(UnitaryMatrix(u), z);
        CHECK(report.dim_w == 1);
        CHECK(report.exact_sum == 2);
        CHECK(brute_force_partial_sum(u, z, 400) == doctest::Approx(2.0).epsilon(1e-6));
    }
    SUBCASE("report bookkeeping holds on random draws") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const int d = 2 + static_cast<int>(seed);
            const auto u = haar_unitary(d, SeedStream{400 + seed, 0});
            const auto report = exact_sum_complex(u, random_unit(d, 500 + seed));
            int theta_total = 0;
            int dim_total = 0;
            for (const auto& entry : report.per_eigenspace) {
                theta_total += entry.dim_theta_intersection;
                dim_total += entry.dim_eigenspace;
            }
            CHECK(dim_total == d);
            CHECK(theta_total == report.dim_w);
            CHECK(report.exact_sum == d - report.dim_w);
            CHECK(report.exact_sum >= 1);
            CHECK(report.exact_sum <= d);
            CHECK(report.contraction_radius >= 0.0);
            CHECK(report.contraction_radius <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("contraction_radius") {
    SUBCASE("d = 2 rotation gives |cos phi|") {
        for (double phi : {0.3, 1.0, 2.5}) {
            const UnitaryMatrix u(oracle::rotation2(phi).cast<Complex>());
            const CVec z = CVec::Unit(2, 0);
            const double rho = contraction_radius(u, z, spectral_decomposition(u));
            CHECK(rho == doctest::Approx(std::abs(std::cos(phi))).epsilon(1e-10));
            // Matches the decay ratio of consecutive iterate norms.
            const double ratio = brute_force_iterate_norm(u.matrix(), z, 3) /
                                 brute_force_iterate_norm(u.matrix(), z, 2);
            CHECK(rho == doctest::Approx(ratio).epsilon(1e-9));
        }
    }
    SUBCASE("identity gives 0") {
        const UnitaryMatrix u(CMat::Identity(3, 3));
        CHECK(contraction_radius(u, CVec::Unit(3, 0), spectral_decomposition(u)) == 0.0);
    }
    SUBCASE("geometric decay beyond the transient") {
        const auto u = haar_unitary(3, SeedStream{11, 0});
        const CVec z = CVec::Unit(3, 0);
        const double rho = contraction_radius(u, z, spectral_decomposition(u));
        REQUIRE(rho < 1.0);
        const double r = 0.5 * (1.0 + rho);
        const int n0 = static_cast<int>(std::ceil(10.0 * 3 / (1.0 - rho)));
        const CMat p = CMat::Identity(3, 3) - z * z.adjoint();
        CVec v = z;
        for (int n = 0; n < n0; ++n) v = p * (u.matrix() * v);
        for (int n = n0; n < n0 + 100; ++n) {
            CHECK(v.norm() <= std::pow(r, n));
            v = p * (u.matrix() * v);
        }
    }
}

TEST_CASE("alpha_trace") {
    SUBCASE("n = 0 gives d") {
        const auto u = haar_unitary(4, SeedStream{21, 0});
        CHECK(alpha_trace(u, CVec::Unit(4, 0), 0) == doctest::Approx(4.0));
    }
    SUBCASE("telescoping against iterate norms") {
        const int d = 5;
        const auto u = haar_unitary(d, SeedStream{22, 0});
        const CVec z = random_unit(d, 23);
        for (int n = 0; n <= 30; ++n) {
            const double diff = alpha_trace(u, z, n) - alpha_trace(u, z, n + 1);
            const double norm_sq = std::pow(brute_force_iterate_norm(u.matrix(), z, n), 2);
            CHECK(std::abs(diff - norm_sq) < 1e-10);
        }
    }
    SUBCASE("identity with z = e1 gives d - 1 for n >= 1") {
        const UnitaryMatrix u(CMat::Identity(4, 4));
        CHECK(alpha_trace(u, CVec::Unit(4, 0), 5) == doctest::Approx(3.0));
    }
    SUBCASE("alpha_N approaches dim W at the truncation step") {
        const int d = 4;
        const auto u = haar_unitary(d, SeedStream{24, 0});
        const CVec z = random_unit(d, 25);
        const auto series = iterate_norms(u, z, 1e-8);
        REQUIRE(series.truncation_reason == TruncationReason::TailBoundMet);
        const auto report = exact_sum_complex(u, z);
        const double alpha_final =
            alpha_trace(u, z, static_cast<int>(series.norms_sq.size()));
        CHECK(std::abs(alpha_final - report.dim_w) < 1e-6);
    }
}

TEST_CASE("real_invariant_planes") {
    SUBCASE("plain 2-D rotation: one plane, no real spectrum, z inside the plane") {
        const OrthogonalMatrix r(oracle::rotation2(1.1));
        const RVec z = RVec::Unit(2, 0);
        const auto rd = real_invariant_planes(r, z);
        CHECK(rd.w_plus.cols() == 0);
        CHECK(rd.w_minus.cols() == 0);
        REQUIRE(rd.planes.size() == 1);
        CHECK(rd.planes[0].angle == doctest::Approx(1.1).epsilon(1e-10));
        CHECK_FALSE(rd.planes[0].contained_in_theta);
    }
    SUBCASE("identity: W_plus is everything") {
        const auto rd = real_invariant_planes(OrthogonalMatrix(RMat::Identity(3, 3)),
                                              RVec::Unit(3, 0));
        CHECK(rd.w_plus.cols() == 3);
        CHECK(rd.w_minus.cols() == 0);
        CHECK(rd.planes.empty());
    }
    SUBCASE("rotation block orthogonal to z: plane contained in Theta") {
        const RMat r = oracle::embedded_rotation(3, 0, 1, std::numbers::pi / 3.0);
        const auto rd = real_invariant_planes(OrthogonalMatrix(r), RVec::Unit(3, 2));
        REQUIRE(rd.planes.size() == 1);
        CHECK(rd.planes[0].contained_in_theta);
        CHECK(rd.w_plus.cols() == 1);
    }
    SUBCASE("planes are genuinely invariant and orthonormal") {
        const auto r = haar_orthogonal(7, SeedStream{31, 0});
        RVec z = RVec::Zero(7);
        {
            Rng rng(SeedStream{32, 0});
            for (int i = 0; i < 7; ++i) z(i) = rng.gaussian();
            z /= z.norm();
        }
        const auto rd = real_invariant_planes(r, z);
        CHECK(rd.w_plus.cols() + rd.w_minus.cols() +
                  2 * static_cast<Eigen::Index>(rd.planes.size()) == 7);
        for (const auto& plane : rd.planes) {
            CHECK(std::abs(plane.x.norm() - 1.0) < 1e-10);
            CHECK(std::abs(plane.y.norm() - 1.0) < 1e-10);
            CHECK(std::abs(plane.x.dot(plane.y)) < 1e-10);
            const RMat projector = plane.x * plane.x.transpose() + plane.y * plane.y.transpose();
            const RVec rx = r.matrix() * plane.x;
            const RVec ry = r.matrix() * plane.y;
            CHECK((rx - projector * rx).norm() < 1e-8);
            CHECK((ry - projector * ry).norm() < 1e-8);
        }
    }
}

TEST_CASE("exact_sum_real") {
    const RVec e1 = RVec::Unit(2, 0);

    SUBCASE("2-D rotations") {
        CHECK(exact_sum_real(OrthogonalMatrix(oracle::rotation2(1.3)), e1).exact_sum == 2);
        CHECK(exact_sum_real(OrthogonalMatrix(oracle::rotation2(0.0)), e1).exact_sum == 1);
        CHECK(exact_sum_real(OrthogonalMatrix(oracle::rotation2(std::numbers::pi)), e1)
                  .exact_sum == 1);
    }
    SUBCASE("2-D reflections against z = e^{i theta}") {
        const double theta = 0.4;
        RVec z(2);
        z << std::cos(theta), std::sin(theta);
        CHECK(exact_sum_real(OrthogonalMatrix(oracle::reflection2(theta + 0.9)), z).exact_sum ==
              2);
        CHECK(exact_sum_real(OrthogonalMatrix(oracle::reflection2(theta)), z).exact_sum == 1);
        CHECK(exact_sum_real(
                  OrthogonalMatrix(oracle::reflection2(theta + std::numbers::pi / 2)), z)
                  .exact_sum == 1);
    }
    SUBCASE("rotation block plus fixed axis with z on the axis gives 1") {
        const RMat r = oracle::embedded_rotation(3, 0, 1, std::numbers::pi / 3.0);
        const RVec z = RVec::Unit(3, 2);
        const auto report = exact_sum_real(OrthogonalMatrix(r), z);
        CHECK(report.exact_sum == 1);
        CHECK(report.dim_w == 2);
        // PRz = Pz = 0: the series dies after the first term.
        CHECK(brute_force_partial_sum(r.cast<Complex>(), z.cast<Complex>(), 500) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("agrees with the complexified route on random draws") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const int d = 2 + static_cast<int>(seed % 7);
            const auto r = haar_orthogonal(d, SeedStream{600 + seed, 0});
            RVec z = RVec::Zero(d);
            Rng rng(SeedStream{700 + seed, 0});
            for (int i = 0; i < d; ++i) z(i) = rng.gaussian();
            z /= z.norm();
            const auto real_report = exact_sum_real(r, z);
            const auto complex_report = exact_sum_complex(complexify(r), z.cast<Complex>());
            CHECK(real_report.exact_sum == complex_report.exact_sum);
            CHECK(real_report.dim_w == complex_report.dim_w);
            CHECK(real_report.contraction_radius ==
                  doctest::Approx(complex_report.contraction_radius).epsilon(1e-9));
            int theta_total = 0;
            int dim_total = 0;
            for (const auto& entry : real_report.per_eigenspace) {
                theta_total += entry.dim_theta_intersection;
                dim_total += entry.dim_eigenspace;
            }
            CHECK(dim_total == d);
            CHECK(theta_total == real_report.dim_w);
        }
    }
}

TEST_CASE("navigation parametrization matches the two-dimensional process") {
    // Evolution: rotation through lon about the vertical axis; start state
    // placed at the given latitude. The immediate-return probability of the
    // resulting process is exactly the closed form.
    for (double lat : {-1.2, -0.3, 0.0, 0.7, 1.4})
        for (double lon : {0.0, 0.4, 1.9, 3.6, 5.5}) {
            CMat u = CMat::Zero(2, 2);
            u(0, 0) = std::polar(1.0, -lon / 2.0);
            u(1, 1) = std::polar(1.0, lon / 2.0);
            const double polar_angle = std::numbers::pi / 2.0 - lat;
            CVec z(2);
            z << Complex(std::cos(polar_angle / 2.0), 0.0),
                Complex(std::sin(polar_angle / 2.0), 0.0);
            const double p = std::norm(z.dot(u * z));
            CHECK(p == doctest::Approx(qubit_p({lat, lon})).epsilon(1e-12));
        }
}

TEST_CASE("navigation closed form") {
    CHECK(haversin(std::numbers::pi) == doctest::Approx(1.0));
    CHECK(havercosin(0.0) == doctest::Approx(1.0));
    CHECK(haversin(0.7) + havercosin(0.7) == doctest::Approx(1.0).epsilon(1e-15));

    CHECK(qubit_p({std::numbers::pi / 2.0, 1.0}) == doctest::Approx(1.0));
    CHECK(qubit_p({0.7, 0.0}) == doctest::Approx(1.0));
    CHECK(qubit_p({0.0, std::numbers::pi}) == doctest::Approx(0.0));

    // p stays a probability over the whole parameter range.
    for (double lat = -1.5; lat <= 1.5; lat += 0.25)
        for (double lon = 0.0; lon < 6.28; lon += 0.3) {
            const double p = qubit_p({lat, lon});
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
        }
}
