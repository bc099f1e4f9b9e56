#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace torwave {

/// A caller-supplied value violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A numeric procedure failed to converge or produced an unusable result.
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Failure inside one Monte Carlo trial, tagged with the trial index.
class TrialError : public std::runtime_error {
  public:
    TrialError(std::uint64_t trial, const std::string& what)
        : std::runtime_error("trial " + std::to_string(trial) + ": " + what), trial_(trial)
    {
    }

    std::uint64_t trial() const noexcept { return trial_; }

  private:
    std::uint64_t trial_;
};

}  // namespace torwave
