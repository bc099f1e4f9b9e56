#include "torwave/serialize.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "torwave/error.hpp"

namespace torwave {
namespace {

// Minimal ordered JSON object writer.
class Obj {
  public:
    Obj& raw(std::string_view key, std::string_view value)
    {
        buf_ += first_ ? "" : ",";
        first_ = false;
        buf_ += fmt::format("\"{}\":{}", key, value);
        return *this;
    }
    Obj& num(std::string_view key, double v) { return raw(key, format_double(v)); }
    Obj& integer(std::string_view key, std::int64_t v) { return raw(key, std::to_string(v)); }
    Obj& uinteger(std::string_view key, std::uint64_t v) { return raw(key, std::to_string(v)); }
    Obj& boolean(std::string_view key, bool v) { return raw(key, v ? "true" : "false"); }
    Obj& str(std::string_view key, std::string_view v) { return raw(key, fmt::format("\"{}\"", v)); }

    std::string done() const { return "{" + buf_ + "}"; }

  private:
    std::string buf_;
    bool first_ = true;
};

template <class Range, class Fn>
std::string array(const Range& r, Fn&& fn)
{
    std::string out = "[";
    bool first = true;
    for (const auto& v : r) {
        if (!first) out += ",";
        first = false;
        out += fn(v);
    }
    return out + "]";
}

std::string doubles(std::span<const double> v)
{
    return array(v, [](double x) { return format_double(x); });
}

std::string tail_json(const TailRow& t)
{
    return Obj()
        .num("eps", t.eps)
        .uinteger("exceed", t.exceed)
        .num("probability", t.probability)
        .num("se", t.se)
        .num("wilson_lo", t.wilson_lo)
        .num("wilson_hi", t.wilson_hi)
        .num("markov", t.markov)
        .done();
}

}  // namespace

std::string format_double(double v)
{
    if (!std::isfinite(v)) return "null";
    return fmt::format("{:.17g}", v);
}

std::string to_json(const EigenvalueSpec& spec)
{
    return Obj()
        .uinteger("m", spec.m)
        .num("lambda", spec.lambda)
        .uinteger("N", spec.N())
        .raw("points", array(spec.points, [](const LatticePoint& p) { return fmt::format("[{},{}]", p.mu1, p.mu2); }))
        .done();
}

std::string to_json(const WaveSample& s)
{
    return Obj()
        .uinteger("m", s.spec->m)
        .uinteger("seed", s.seed_path.master_seed)
        .uinteger("trial", s.seed_path.trial)
        .raw("a", doubles(s.a))
        .raw("b", doubles(s.b))
        .done();
}

std::string to_json(const ZeroCountResult& r)
{
    return Obj()
        .uinteger("count", r.count)
        .uinteger("suspects", r.suspects)
        .uinteger("near_tangencies", r.near_tangencies)
        .num("certified_fraction", r.certified_fraction)
        .raw("roots", doubles(r.roots))
        .done();
}

std::string to_json(const IntervalClassification& c)
{
    return Obj()
        .num("R", c.R)
        .num("delta", c.delta)
        .num("alpha", c.alpha)
        .num("beta", c.beta)
        .uinteger("unstable_count", c.unstable_count)
        .boolean("exceptional", c.exceptional)
        .raw("intervals", array(c.intervals,
                                [](const ClassifiedInterval& iv) {
                                    return Obj().num("start", iv.start).num("end", iv.end).boolean("stable", iv.stable).done();
                                }))
        .done();
}

std::string to_json(const CurveValidation& v, std::string_view curve)
{
    return Obj()
        .str("curve", curve)
        .uinteger("grid_size", v.grid_size)
        .num("max_unit_speed_defect", v.max_unit_speed_defect)
        .num("curvature_min", v.curvature_min)
        .num("curvature_max", v.curvature_max)
        .num("closure_defect", v.closure_defect)
        .num("closure_defect_d1", v.closure_defect_d1)
        .boolean("passed", v.passed)
        .done();
}

std::string to_json(const ExperimentReport& r)
{
    return Obj()
        .uinteger("m", r.m)
        .uinteger("N", r.N)
        .num("lambda", r.lambda)
        .uinteger("trials", r.trials)
        .num("mean", r.mean)
        .num("mean_se", r.mean_se)
        .num("variance", r.variance)
        .num("variance_se", r.variance_se)
        .num("theory_mean", r.theory_mean)
        .num("variance_scale", r.variance_scale)
        .num("variance_ratio", r.variance_ratio)
        .uinteger("suspects_total", r.suspects_total)
        .raw("tail_table", array(r.tail_table, tail_json))
        .done();
}

std::string to_json(const VarianceTerm& v)
{
    return Obj().num("factorized", v.factorized).num("tensor", v.tensor).num("scale", v.scale).done();
}

std::string to_json(const RepulsionResult& r)
{
    return Obj()
        .uinteger("trials", r.trials)
        .uinteger("hits", r.hits)
        .num("p_hat", r.p_hat)
        .num("ratio", r.ratio)
        .num("ratio_se", r.ratio_se)
        .boolean("below_window", r.below_window)
        .done();
}

std::string to_json(const UniversalityReport& r)
{
    return Obj()
        .raw("first", to_json(r.first))
        .raw("second", to_json(r.second))
        .num("mean_gap", r.mean_gap)
        .num("mean_gap_se", r.mean_gap_se)
        .num("variance_gap", r.variance_gap)
        .num("variance_gap_se", r.variance_gap_se)
        .num("scale", r.scale)
        .done();
}

std::string to_json(std::span<const ScanRow> rows, double eps)
{
    return Obj()
        .num("eps", eps)
        .raw("rows", array(rows,
                           [](const ScanRow& r) {
                               return Obj()
                                   .uinteger("m", r.m)
                                   .uinteger("N", r.N)
                                   .num("lambda", r.lambda)
                                   .num("mean", r.mean)
                                   .raw("tail", tail_json(r.tail))
                                   .boolean("eps_outside_window", r.eps_outside_window)
                                   .done();
                           }))
        .done();
}

std::string to_json(const SieveScan& s)
{
    return Obj()
        .uinteger("samples", s.samples)
        .num("separation", s.separation)
        .num("max_ratio_d1", s.max_ratio_d1)
        .num("max_ratio_d2", s.max_ratio_d2)
        .num("mean_ratio_d1", s.mean_ratio_d1)
        .num("mean_ratio_d2", s.mean_ratio_d2)
        .done();
}

std::string to_json(const JensenDiagnostic& d)
{
    return Obj()
        .num("t1", d.t1)
        .num("t2", d.t2)
        .num("max_abs_f", d.max_abs_f)
        .num("max_abs_df", d.max_abs_df)
        .uinteger("roots", d.roots)
        .num("bound", d.bound)
        .boolean("premise", d.premise)
        .boolean("holds", d.holds)
        .done();
}

std::string to_json(const PerturbationReport& r)
{
    return Obj()
        .num("alpha", r.params.alpha)
        .num("beta", r.params.beta)
        .num("R", r.params.R)
        .num("delta", r.params.delta)
        .num("tau", r.params.tau)
        .uinteger("samples", r.samples)
        .uinteger("exceptional_samples", r.exceptional_samples)
        .uinteger("intervals_checked", r.intervals_checked)
        .uinteger("roots_checked", r.roots_checked)
        .uinteger("failures", r.failures)
        .num("max_displacement", r.max_displacement)
        .num("allowed_displacement", r.allowed_displacement)
        .done();
}

void write_trial_csv(const TrialBatch& batch, std::ostream& out)
{
    out << "trial,z,suspects,seed\n";
    for (std::size_t i = 0; i < batch.trials; ++i) {
        out << i << ',' << batch.z_values[i] << ',' << batch.suspects[i] << ',' << batch.master_seed << '\n';
    }
}

TrialRecords read_trial_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != "trial,z,suspects,seed") {
        throw InvalidArgument("trial CSV: missing header 'trial,z,suspects,seed'");
    }
    TrialRecords rec;
    std::size_t expected = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::uint64_t trial = 0, seed = 0;
        std::int64_t z = 0, suspects = 0;
        char c1 = 0, c2 = 0, c3 = 0;
        if (!(row >> trial >> c1 >> z >> c2 >> suspects >> c3 >> seed) || c1 != ',' || c2 != ',' || c3 != ',') {
            throw InvalidArgument(fmt::format("trial CSV: malformed row '{}'", line));
        }
        if (trial != expected) throw InvalidArgument(fmt::format("trial CSV: expected trial {}, got {}", expected, trial));
        if (expected == 0) rec.seed = seed;
        if (seed != rec.seed) throw InvalidArgument(fmt::format("trial CSV: seed changes at trial {}", trial));
        rec.z_values.push_back(z);
        rec.suspects.push_back(suspects);
        ++expected;
    }
    return rec;
}

std::string replay_json(std::string_view text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(fmt::format("replay: invalid JSON ({})", e.what()));
    }
    try {
        if (j.contains("points")) {
            const auto spec = enumerate_lattice_points(j.at("m").get<std::uint64_t>());
            std::vector<LatticePoint> pts;
            for (const auto& p : j.at("points")) pts.push_back({p.at(0).get<std::int64_t>(), p.at(1).get<std::int64_t>()});
            if (pts != spec.points || j.at("N").get<std::size_t>() != spec.N() ||
                j.at("lambda").get<double>() != spec.lambda) {
                throw InvalidArgument("replay: lattice JSON does not match a fresh enumeration");
            }
            return to_json(spec);
        }
        if (j.contains("tail_table")) {
            ExperimentReport r;
            r.m = j.at("m").get<std::uint64_t>();
            r.N = j.at("N").get<std::size_t>();
            r.lambda = j.at("lambda").get<double>();
            r.trials = j.at("trials").get<std::size_t>();
            r.mean = j.at("mean").get<double>();
            r.mean_se = j.at("mean_se").get<double>();
            r.variance = j.at("variance").get<double>();
            r.variance_se = j.at("variance_se").get<double>();
            r.theory_mean = j.at("theory_mean").get<double>();
            r.variance_scale = j.at("variance_scale").get<double>();
            r.variance_ratio = j.at("variance_ratio").get<double>();
            r.suspects_total = j.at("suspects_total").get<std::size_t>();
            for (const auto& t : j.at("tail_table")) {
                TailRow row;
                row.eps = t.at("eps").get<double>();
                row.exceed = t.at("exceed").get<std::size_t>();
                row.probability = t.at("probability").get<double>();
                row.se = t.at("se").get<double>();
                row.wilson_lo = t.at("wilson_lo").get<double>();
                row.wilson_hi = t.at("wilson_hi").get<double>();
                row.markov = t.at("markov").get<double>();
                r.tail_table.push_back(row);
            }
            return to_json(r);
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(fmt::format("replay: unexpected JSON layout ({})", e.what()));
    }
    throw InvalidArgument("replay: unrecognised JSON document (expected a lattice spec or an experiment report)");
}

}  // namespace torwave
