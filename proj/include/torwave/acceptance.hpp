#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace torwave::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct Preset {
    std::string name;
    std::string summary;
    std::function<std::vector<CriterionResult>()> run;
};

/// Registered presets: one per criterion plus "all" and the per-m mean checks.
const std::vector<Preset>& presets();

/// nullptr when unknown.
const Preset* find_preset(std::string_view name);

/// "[PASS] C04 expected-count   1.23s  detail"
std::string format_result(const CriterionResult& r);

}  // namespace torwave::acceptance
