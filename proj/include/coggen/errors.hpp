#pragma once

#include <stdexcept>
#include <string>

namespace coggen {

enum class errc {
  non_power_of_two,
  non_finite,
  no_convergence,
  budget_infeasible,
  bad_dims,
  shape_mismatch,
  all_zero_measurements,
  bad_weight,
  length_mismatch,
  final_stage,
  bad_config,
  degenerate_denominator,
  non_finite_loss,
  step_size_too_large,
  dim_mismatch,
  bound_violated,
  bad_inputs,
  non_expansiveness_violated,
  zero_reference,
  bad_magic,
  truncated_file,
  unsupported_version,
  io_error,
};

// All recoverable failures surface as this one exception type; the code
// tells callers (and the CLI exit-code mapping) what went wrong.
class error : public std::runtime_error {
public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace coggen
