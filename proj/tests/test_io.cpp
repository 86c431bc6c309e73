#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "dimwitness/io.hpp"
#include "support/oracles.hpp"

using namespace dimwitness;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("dimwitness_io_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

} // namespace

TEST_CASE("matrix files round-trip") {
    TempDir dir;

    SUBCASE("unitary") {
        const auto u = haar_unitary(4, SeedStream{1, 0});
        write_file(dir.file("u.json"), io::unitary_to_json(u).dump());
        const auto loaded = io::load_unitary(dir.file("u.json"));
        CHECK(loaded.matrix() == u.matrix());
    }
    SUBCASE("orthogonal") {
        const auto r = haar_orthogonal(3, SeedStream{2, 0});
        write_file(dir.file("r.json"), io::orthogonal_to_json(r).dump());
        const auto loaded = io::load_orthogonal(dir.file("r.json"));
        CHECK(loaded.matrix() == r.matrix());
        // An orthogonal file also loads as a (complexified) unitary.
        CHECK(io::load_unitary(dir.file("r.json")).matrix() == r.matrix().cast<Complex>());
    }
    SUBCASE("vector, complex and real") {
        CVec z(3);
        z << Complex(0.6, 0.0), Complex(0.0, 0.8), Complex(0.0, 0.0);
        write_file(dir.file("z.json"), io::vector_to_json(z).dump());
        CHECK(io::load_vector(dir.file("z.json")) == z);

        write_file(dir.file("zr.json"), R"({"kind":"vector","d":2,"re":[1.0,0.0]})");
        const CVec real_z = io::load_vector(dir.file("zr.json"));
        CHECK(real_z(0) == Complex(1.0, 0.0));
    }
}

TEST_CASE("matrix file rejection") {
    TempDir dir;

    SUBCASE("malformed JSON") {
        write_file(dir.file("bad.json"), "{not json");
        CHECK_THROWS_AS(io::load_matrix_file(dir.file("bad.json")), InvalidInputError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(io::load_matrix_file(dir.file("absent.json")), InvalidInputError);
    }
    SUBCASE("non-unitary data") {
        write_file(dir.file("nonu.json"),
                   R"({"kind":"unitary","d":2,"re":[[2,0],[0,1]],"im":[[0,0],[0,0]]})");
        CHECK_THROWS_AS(io::load_matrix_file(dir.file("nonu.json")), InvalidInputError);
    }
    SUBCASE("imaginary block on an orthogonal kind") {
        write_file(dir.file("badr.json"),
                   R"({"kind":"orthogonal","d":2,"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]})");
        CHECK_THROWS_AS(io::load_matrix_file(dir.file("badr.json")), InvalidInputError);
    }
    SUBCASE("dimension mismatch") {
        write_file(dir.file("dim.json"), R"({"kind":"unitary","d":3,"re":[[1,0],[0,1]]})");
        CHECK_THROWS_AS(io::load_matrix_file(dir.file("dim.json")), InvalidInputError);
    }
    SUBCASE("unknown kind") {
        write_file(dir.file("kind.json"), R"({"kind":"hermitian","d":1,"re":[[1]]})");
        CHECK_THROWS_AS(io::load_matrix_file(dir.file("kind.json")), InvalidInputError);
    }
}

TEST_CASE("csv emitters") {
    SUBCASE("iterate csv for the identity") {
        const auto series = iterate_norms(UnitaryMatrix(CMat::Identity(3, 3)), CVec::Unit(3, 0));
        const std::string csv = io::iterate_csv(series);
        CHECK(csv == "n,norm_sq,partial_sum\r\n0,1,1\r\n1,0,1\r\n"
                     "# truncation_reason: tail-bound-met\r\n");
    }
    SUBCASE("trajectory csv flags renewals") {
        OutcomeString outcome;
        outcome.symbols = "010";
        const std::string csv = io::trajectory_csv(outcome);
        CHECK(csv == "step,outcome,renewal_flag\r\n1,0,1\r\n2,1,0\r\n3,0,1\r\n");
    }
    SUBCASE("sweep csv schema") {
        SweepRow row;
        row.dimension = 2;
        row.rep = 0;
        row.estimate = 2;
        row.stopping_step = 7;
        row.correct = true;
        row.steps_to_d = 4.5;
        row.steps_to_half_d = 1.0;
        row.stopped_by = StoppedBy::CriterionMet;
        const std::string csv = io::sweep_csv({row});
        CHECK(csv == "d,rep,d_tilde,N_tilde,accuracy,steps_to_d,steps_to_half_d,stopped_by\r\n"
                     "2,0,2,7,1.0,4.5,1,criterion-met\r\n");
    }
}

TEST_CASE("report and result serialization") {
    const auto u = haar_unitary(3, SeedStream{5, 0});
    const auto report = exact_sum_complex(u, CVec::Unit(3, 0));
    const auto as_json = io::report_to_json(report);
    CHECK(as_json["exact_sum"] == report.exact_sum);
    CHECK(as_json["dimension"] == 3);
    CHECK(as_json["per_eigenspace"].size() == report.per_eigenspace.size());

    EstimatorConfig config;
    config.dimension = 2;
    config.ensemble_size = 5;
    config.master_seed = 3;
    const auto result = run_estimator(config);
    const auto result_json = io::estimator_result_to_json(config, result);
    CHECK(result_json["d_tilde"] == result.estimate);
    CHECK(result_json["config"]["M"] == 5);
    CHECK(result_json["final_d"].size() == 5);
}

TEST_CASE("digests and manifests") {
    TempDir dir;
    write_file(dir.file("a.txt"), "alpha");
    write_file(dir.file("b.txt"), "alpha");
    write_file(dir.file("c.txt"), "beta");

    const auto da = io::file_digest(dir.file("a.txt"));
    CHECK(da == io::file_digest(dir.file("b.txt")));
    CHECK(da != io::file_digest(dir.file("c.txt")));
    CHECK(da.size() == 16);

    const auto manifest = io::make_manifest("exact-sum", {{"matrix", "a.txt"}}, 99,
                                            {{dir.file("a.txt"), da}});
    CHECK(manifest["subcommand"] == "exact-sum");
    CHECK(manifest["master_seed"] == 99);
    CHECK(manifest["inputs"][0]["digest"] == da);
    CHECK(manifest.contains("version"));
}
