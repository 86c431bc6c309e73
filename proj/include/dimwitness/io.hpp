#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dimwitness/estimator.hpp"
#include "dimwitness/simulate.hpp"
#include "dimwitness/witness.hpp"

// File formats and emitters shared by the CLI and the tests.
//
// Matrix/vector files are JSON objects
//   {"kind": "unitary"|"orthogonal"|"vector", "d": n, "re": [[..]], "im": [[..]]}
// with "im" omitted for real kinds and rows in row-major order. Loading
// rejects anything that fails the type invariants at the stated tolerances.

namespace dimwitness::io {

using nlohmann::json;

struct MatrixFile {
    std::string kind;  // "unitary" | "orthogonal" | "vector"
    CMat complex_data; // populated for "unitary" and "vector"
    RMat real_data;    // populated for "orthogonal"
};

MatrixFile load_matrix_file(const std::string& path, double tol = kDefaultUnitarityTol);

UnitaryMatrix load_unitary(const std::string& path, double tol = kDefaultUnitarityTol);
OrthogonalMatrix load_orthogonal(const std::string& path, double tol = kDefaultUnitarityTol);
CVec load_vector(const std::string& path);

json unitary_to_json(const UnitaryMatrix& u);
json orthogonal_to_json(const OrthogonalMatrix& r);
json vector_to_json(const CVec& z);

// ---------------------------------------------------------------------------
// Result serialization

json report_to_json(const ExactSumReport& report);
json return_time_to_json(const ReturnTimeStats& stats, bool include_samples = true);
json estimator_result_to_json(const EstimatorConfig& config, const EstimatorResult& result);
json sweep_summary_to_json(const std::vector<SweepSummary>& summary);

// CSV emitters (RFC 4180 records, CRLF-terminated).
// iterate: header n,norm_sq,partial_sum plus a trailing comment line carrying
// the truncation reason.
std::string iterate_csv(const IterateSeries& series);
// trajectory: header step,outcome,renewal_flag.
std::string trajectory_csv(const OutcomeString& outcome);
// sweep: header d,rep,d_tilde,N_tilde,accuracy,steps_to_d,steps_to_half_d,stopped_by.
std::string sweep_csv(const std::vector<SweepRow>& rows);

// ---------------------------------------------------------------------------
// Run manifests

// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters.
std::string file_digest(const std::string& path);

// Every CLI invocation emits one of these; identical manifests imply
// bit-identical outputs.
json make_manifest(const std::string& subcommand, const json& resolved_config,
                   std::uint64_t master_seed,
                   const std::vector<std::pair<std::string, std::string>>& input_digests);

} // namespace dimwitness::io
