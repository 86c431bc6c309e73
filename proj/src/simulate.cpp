#include "dimwitness/simulate.hpp"

#include <cmath>

namespace dimwitness {

namespace {

void check_symbols(const std::string& symbols) {
    for (char c : symbols)
        if (c != '0' && c != '1')
            throw InvalidInputError("outcome string may contain only '0' and '1'");
}

} // namespace

MeasurementProcess::MeasurementProcess(UnitaryMatrix u_, CVec z_)
    : u(std::move(u_)), p(std::move(z_)) {
    if (u.dim() != p.dim())
        throw InvalidInputError("measurement process: dimension mismatch between U and z");
}

// ---------------------------------------------------------------------------
// Exact probabilities

double string_probability(const MeasurementProcess& proc, const std::string& symbols) {
    if (symbols.empty()) throw InvalidInputError("string_probability: empty outcome string");
    check_symbols(symbols);
    const CVec& z = proc.z();
    CVec state = z;
    for (char c : symbols) {
        const CVec evolved = proc.u.matrix() * state;
        if (c == '1')
            state = proc.p.apply(evolved);
        else
            state = z * z.dot(evolved);
    }
    return state.squaredNorm();
}

double all_ones_probability(const MeasurementProcess& proc, int n) {
    if (n < 0) throw InvalidInputError("all_ones_probability: n must be nonnegative");
    if (n == 0) return 1.0;
    CVec state = proc.z();
    for (int k = 0; k < n; ++k) state = proc.p.apply(proc.u.matrix() * state);
    return state.squaredNorm();
}

double first_return_probability(const MeasurementProcess& proc, int n) {
    if (n < 0) throw InvalidInputError("first_return_probability: n must be nonnegative");
    return all_ones_probability(proc, n) - all_ones_probability(proc, n + 1);
}

MeanReturnTime mean_return_time_series(const MeasurementProcess& proc, double tail_tol,
                                       int max_steps) {
    const IterateSeries series = iterate_norms(proc.u, proc.z(), tail_tol, max_steps);
    return MeanReturnTime{series.sum(), series.truncation_reason};
}

double markov_string_probability(const Eigen::Matrix2d& transition, const std::string& symbols) {
    if (symbols.empty()) throw InvalidInputError("markov_string_probability: empty string");
    check_symbols(symbols);
    for (int row = 0; row < 2; ++row) {
        if (transition(row, 0) < -1e-12 || transition(row, 1) < -1e-12)
            throw InvalidInputError("markov_string_probability: negative transition probability");
        if (std::abs(transition.row(row).sum() - 1.0) > 1e-12)
            throw InvalidInputError("markov_string_probability: rows must sum to 1");
    }
    int previous = 0;  // initial distribution concentrated at outcome 0
    double probability = 1.0;
    for (char c : symbols) {
        const int next = c - '0';
        probability *= transition(previous, next);
        previous = next;
    }
    return probability;
}

// ---------------------------------------------------------------------------
// Trajectory sampling

namespace {

struct Sampler {
    const MeasurementProcess& proc;
    Rng rng;
    CVec state;

    Sampler(const MeasurementProcess& p, const SeedStream& stream)
        : proc(p), rng(stream), state(p.z()) {}

    // One measurement step; '0' resets the chain to z (a renewal).
    char step() {
        const CVec evolved = proc.u.matrix() * state;
        const Complex overlap = proc.z().dot(evolved);
        const double q = std::min(1.0, std::norm(overlap));
        if (rng.uniform() < q) {
            state = proc.z();
            return '0';
        }
        CVec projected = evolved - proc.z() * overlap;
        const double norm = projected.norm();
        if (norm < 1e-14)
            throw NumericFailureError(
                "sample_outcomes: outcome 1 drawn with probability mass below the noise floor",
                norm);
        state = projected / norm;
        return '1';
    }
};

} // namespace

OutcomeString sample_outcomes(const MeasurementProcess& proc, std::int64_t length,
                              const SeedStream& stream) {
    if (length < 1) throw InvalidInputError("sample_outcomes: length must be >= 1");
    Sampler sampler(proc, stream);
    OutcomeString out;
    out.symbols.reserve(static_cast<std::size_t>(length));
    for (std::int64_t i = 0; i < length; ++i) out.symbols.push_back(sampler.step());
    return out;
}

ReturnTimeStats monte_carlo_return_time(const MeasurementProcess& proc,
                                        std::int64_t target_returns, const SeedStream& stream,
                                        std::int64_t step_cap) {
    if (target_returns < 1)
        throw InvalidInputError("monte_carlo_return_time: target_returns must be >= 1");
    if (step_cap < 1) throw InvalidInputError("monte_carlo_return_time: step_cap must be >= 1");

    Sampler sampler(proc, stream);
    ReturnTimeStats stats;
    stats.samples.reserve(static_cast<std::size_t>(target_returns));
    std::int64_t gap = 0;
    while (stats.count < target_returns && stats.steps_taken < step_cap) {
        ++stats.steps_taken;
        ++gap;
        if (sampler.step() == '0') {
            stats.samples.push_back(gap);
            ++stats.count;
            gap = 0;
        }
    }
    stats.complete = stats.count == target_returns;

    if (stats.count > 0) {
        double sum = 0.0;
        for (auto t : stats.samples) sum += static_cast<double>(t);
        stats.mean = sum / static_cast<double>(stats.count);
        if (stats.count > 1) {
            double ss = 0.0;
            for (auto t : stats.samples) {
                const double dev = static_cast<double>(t) - stats.mean;
                ss += dev * dev;
            }
            const double variance = ss / static_cast<double>(stats.count - 1);
            stats.standard_error = std::sqrt(variance / static_cast<double>(stats.count));
        }
    }
    return stats;
}

} // namespace dimwitness
