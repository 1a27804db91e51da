#pragma once

#include <stdexcept>
#include <string>

namespace dynpanel {

/// Malformed or inconsistent input data (bad shapes, non-finite values,
/// unparseable files). Maps to CLI exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NumericalFailure {
  unpenalized_degeneracy,
  degenerate_selection,
  degenerate_column,
  inversion_failure,
  negative_variance,
  rank_deficient,
  unstable_dgp,
};

const char* to_string(NumericalFailure kind);

/// A well-formed problem on which a numerical step broke down.
/// Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(NumericalFailure kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  NumericalFailure kind() const noexcept { return kind_; }

 private:
  NumericalFailure kind_;
};

/// Caller violated a precondition of the API (e.g. asked for a debiased
/// entry without the matching nodewise row).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace dynpanel
