#include "dimwitness/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dimwitness/version.hpp"

namespace dimwitness::io {

namespace {

json parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open file: " + path);
    json parsed;
    try {
        parsed = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInputError("malformed JSON in " + path + ": " + e.what());
    }
    if (!parsed.is_object()) throw InvalidInputError(path + ": expected a JSON object");
    return parsed;
}

// Rows of numbers; a flat list is accepted for vectors.
std::vector<std::vector<double>> parse_rows(const json& node, const std::string& label) {
    if (!node.is_array()) throw InvalidInputError(label + " must be an array");
    std::vector<std::vector<double>> rows;
    if (!node.empty() && node.front().is_number()) {
        rows.emplace_back();
        for (const auto& entry : node) {
            if (!entry.is_number()) throw InvalidInputError(label + ": mixed array shapes");
            rows.back().push_back(entry.get<double>());
        }
        return rows;
    }
    for (const auto& row : node) {
        if (!row.is_array()) throw InvalidInputError(label + ": expected rows of numbers");
        rows.emplace_back();
        for (const auto& entry : row) {
            if (!entry.is_number()) throw InvalidInputError(label + ": non-numeric entry");
            rows.back().push_back(entry.get<double>());
        }
    }
    return rows;
}

RMat rows_to_matrix(const std::vector<std::vector<double>>& rows, Eigen::Index d,
                    const std::string& label) {
    if (static_cast<Eigen::Index>(rows.size()) != d)
        throw InvalidInputError(label + ": row count does not match d");
    RMat m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != d)
            throw InvalidInputError(label + ": column count does not match d");
        for (Eigen::Index j = 0; j < d; ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return m;
}

std::string format_double(double x) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.17g", x);
    return buffer;
}

} // namespace

MatrixFile load_matrix_file(const std::string& path, double tol) {
    const json parsed = parse_file(path);
    if (!parsed.contains("kind") || !parsed["kind"].is_string())
        throw InvalidInputError(path + ": missing \"kind\"");
    if (!parsed.contains("d") || !parsed["d"].is_number_integer())
        throw InvalidInputError(path + ": missing integer \"d\"");
    if (!parsed.contains("re")) throw InvalidInputError(path + ": missing \"re\"");

    MatrixFile file;
    file.kind = parsed["kind"].get<std::string>();
    const auto d = parsed["d"].get<Eigen::Index>();
    if (d < 1) throw InvalidInputError(path + ": d must be >= 1");

    if (file.kind == "vector") {
        auto re_rows = parse_rows(parsed["re"], path + ": re");
        std::vector<double> re_flat;
        for (const auto& row : re_rows) re_flat.insert(re_flat.end(), row.begin(), row.end());
        std::vector<double> im_flat(re_flat.size(), 0.0);
        if (parsed.contains("im")) {
            auto im_rows = parse_rows(parsed["im"], path + ": im");
            im_flat.clear();
            for (const auto& row : im_rows) im_flat.insert(im_flat.end(), row.begin(), row.end());
        }
        if (static_cast<Eigen::Index>(re_flat.size()) != d ||
            static_cast<Eigen::Index>(im_flat.size()) != d)
            throw InvalidInputError(path + ": vector length does not match d");
        CMat column(d, 1);
        for (Eigen::Index i = 0; i < d; ++i)
            column(i, 0) = Complex(re_flat[static_cast<std::size_t>(i)],
                                   im_flat[static_cast<std::size_t>(i)]);
        if (!column.allFinite()) throw InvalidInputError(path + ": non-finite entries");
        file.complex_data = std::move(column);
        return file;
    }

    const RMat re = rows_to_matrix(parse_rows(parsed["re"], path + ": re"), d, path);
    if (file.kind == "orthogonal") {
        if (parsed.contains("im"))
            throw InvalidInputError(path + ": \"im\" is not allowed for orthogonal kind");
        file.real_data = re;
        (void)OrthogonalMatrix(re, tol);  // reject before handing the data out
        return file;
    }
    if (file.kind == "unitary") {
        CMat m = re.cast<Complex>();
        if (parsed.contains("im")) {
            const RMat im = rows_to_matrix(parse_rows(parsed["im"], path + ": im"), d, path);
            m += Complex(0.0, 1.0) * im.cast<Complex>();
        }
        (void)UnitaryMatrix(m, tol);
        file.complex_data = std::move(m);
        return file;
    }
    throw InvalidInputError(path + ": unknown kind \"" + file.kind + "\"");
}

UnitaryMatrix load_unitary(const std::string& path, double tol) {
    MatrixFile file = load_matrix_file(path, tol);
    if (file.kind == "unitary") return UnitaryMatrix(std::move(file.complex_data), tol);
    if (file.kind == "orthogonal")
        return complexify(OrthogonalMatrix(std::move(file.real_data), tol));
    throw InvalidInputError(path + ": expected a matrix kind, got \"" + file.kind + "\"");
}

OrthogonalMatrix load_orthogonal(const std::string& path, double tol) {
    MatrixFile file = load_matrix_file(path, tol);
    if (file.kind != "orthogonal")
        throw InvalidInputError(path + ": expected kind \"orthogonal\", got \"" + file.kind +
                                "\"");
    return OrthogonalMatrix(std::move(file.real_data), tol);
}

CVec load_vector(const std::string& path) {
    MatrixFile file = load_matrix_file(path);
    if (file.kind != "vector")
        throw InvalidInputError(path + ": expected kind \"vector\", got \"" + file.kind + "\"");
    return file.complex_data.col(0);
}

json unitary_to_json(const UnitaryMatrix& u) {
    json re = json::array();
    json im = json::array();
    for (Eigen::Index i = 0; i < u.dim(); ++i) {
        json re_row = json::array();
        json im_row = json::array();
        for (Eigen::Index j = 0; j < u.dim(); ++j) {
            re_row.push_back(u.matrix()(i, j).real());
            im_row.push_back(u.matrix()(i, j).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    return json{{"kind", "unitary"}, {"d", u.dim()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

json orthogonal_to_json(const OrthogonalMatrix& r) {
    json re = json::array();
    for (Eigen::Index i = 0; i < r.dim(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < r.dim(); ++j) row.push_back(r.matrix()(i, j));
        re.push_back(std::move(row));
    }
    return json{{"kind", "orthogonal"}, {"d", r.dim()}, {"re", std::move(re)}};
}

json vector_to_json(const CVec& z) {
    json re = json::array();
    json im = json::array();
    bool complex_entries = false;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        re.push_back(z(i).real());
        im.push_back(z(i).imag());
        if (z(i).imag() != 0.0) complex_entries = true;
    }
    json out{{"kind", "vector"}, {"d", z.size()}, {"re", std::move(re)}};
    if (complex_entries) out["im"] = std::move(im);
    return out;
}

// ---------------------------------------------------------------------------
// Result serialization

json report_to_json(const ExactSumReport& report) {
    json per = json::array();
    for (const auto& entry : report.per_eigenspace)
        per.push_back(json{{"eigenvalue_re", entry.eigenvalue.real()},
                           {"eigenvalue_im", entry.eigenvalue.imag()},
                           {"dim_eigenspace", entry.dim_eigenspace},
                           {"dim_theta_intersection", entry.dim_theta_intersection}});
    return json{{"dimension", report.dimension},
                {"exact_sum", report.exact_sum},
                {"dim_w", report.dim_w},
                {"contraction_radius", report.contraction_radius},
                {"per_eigenspace", std::move(per)}};
}

json return_time_to_json(const ReturnTimeStats& stats, bool include_samples) {
    json out{{"count", stats.count},
             {"mean", stats.mean},
             {"standard_error", stats.standard_error},
             {"steps_taken", stats.steps_taken},
             {"complete", stats.complete}};
    if (include_samples) out["samples"] = stats.samples;
    return out;
}

json estimator_result_to_json(const EstimatorConfig& config, const EstimatorResult& result) {
    json config_echo{{"d", config.dimension},
                     {"M", config.ensemble_size},
                     {"beta", config.quorum},
                     {"s", config.stability_window},
                     {"N_max", config.max_steps},
                     {"master_seed", config.master_seed},
                     {"ceiling_clamp", config.ceiling_clamp},
                     {"quorum_at_stop", config.require_quorum_at_stop}};
    json out{{"config", std::move(config_echo)},
             {"d_tilde", result.estimate},
             {"N_tilde", result.stopping_step},
             {"stopped_by", to_string(result.stopped_by)},
             {"final_d", result.final_bounds}};
    return out;
}

json sweep_summary_to_json(const std::vector<SweepSummary>& summary) {
    json rows = json::array();
    for (const auto& entry : summary)
        rows.push_back(json{{"d", entry.dimension},
                            {"reps", entry.reps},
                            {"accuracy", entry.accuracy},
                            {"mean_N_tilde", entry.mean_stopping_step},
                            {"mean_steps_to_d", entry.mean_steps_to_d},
                            {"mean_steps_to_half_d", entry.mean_steps_to_half_d}});
    return rows;
}

// ---------------------------------------------------------------------------
// CSV

std::string iterate_csv(const IterateSeries& series) {
    std::ostringstream out;
    out << "n,norm_sq,partial_sum\r\n";
    for (std::size_t n = 0; n < series.norms_sq.size(); ++n)
        out << n << ',' << format_double(series.norms_sq[n]) << ','
            << format_double(series.partial_sums[n]) << "\r\n";
    out << "# truncation_reason: " << to_string(series.truncation_reason) << "\r\n";
    return out.str();
}

std::string trajectory_csv(const OutcomeString& outcome) {
    std::ostringstream out;
    out << "step,outcome,renewal_flag\r\n";
    for (std::size_t i = 0; i < outcome.symbols.size(); ++i) {
        const char c = outcome.symbols[i];
        out << (i + 1) << ',' << c << ',' << (c == '0' ? 1 : 0) << "\r\n";
    }
    return out.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "d,rep,d_tilde,N_tilde,accuracy,steps_to_d,steps_to_half_d,stopped_by\r\n";
    for (const auto& row : rows)
        out << row.dimension << ',' << row.rep << ',' << row.estimate << ',' << row.stopping_step
            << ',' << (row.correct ? "1.0" : "0.0") << ',' << format_double(row.steps_to_d) << ','
            << format_double(row.steps_to_half_d) << ',' << to_string(row.stopped_by) << "\r\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Manifests

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open file for digest: " + path);
    std::uint64_t hash = 0xCBF29CE484222325ull;
    char buffer[4096];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 0x100000001B3ull;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    return hex;
}

json make_manifest(const std::string& subcommand, const json& resolved_config,
                   std::uint64_t master_seed,
                   const std::vector<std::pair<std::string, std::string>>& input_digests) {
    json inputs = json::array();
    for (const auto& [path, digest] : input_digests)
        inputs.push_back(json{{"path", path}, {"digest", digest}});
    return json{{"subcommand", subcommand},
                {"version", kVersion},
                {"master_seed", master_seed},
                {"config", resolved_config},
                {"inputs", std::move(inputs)}};
}

} // namespace dimwitness::io
