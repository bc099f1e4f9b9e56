#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "torwave/experiments.hpp"

namespace torwave {

/// Floats are written with 17 significant digits so that parsing recovers
/// the exact double.
std::string format_double(double v);

std::string to_json(const EigenvalueSpec& spec);
std::string to_json(const WaveSample& sample);
std::string to_json(const ZeroCountResult& r);
std::string to_json(const IntervalClassification& c);
std::string to_json(const CurveValidation& v, std::string_view curve);
std::string to_json(const ExperimentReport& r);
std::string to_json(const VarianceTerm& v);
std::string to_json(const RepulsionResult& r);
std::string to_json(const UniversalityReport& r);
std::string to_json(std::span<const ScanRow> rows, double eps);
std::string to_json(const SieveScan& s);
std::string to_json(const JensenDiagnostic& d);
std::string to_json(const PerturbationReport& r);

/// CSV trial dump with header "trial,z,suspects,seed".
void write_trial_csv(const TrialBatch& batch, std::ostream& out);

struct TrialRecords {
    std::vector<std::int64_t> z_values;
    std::vector<std::int64_t> suspects;
    std::uint64_t seed = 0;
};

/// Parses a trial dump; rows must be in trial order 0, 1, 2, ...
TrialRecords read_trial_csv(std::istream& in);

/// Re-reads JSON emitted by this tool (EigenvalueSpec or ExperimentReport) and
/// re-serializes it. Lattice specs are checked against a fresh enumeration.
std::string replay_json(std::string_view text);

}  // namespace torwave
