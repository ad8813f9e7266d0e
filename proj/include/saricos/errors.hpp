#pragma once

#include <stdexcept>
#include <string>

namespace saricos {

// Bad input values (non-finite rewards, mismatched shapes, empty batches).
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Caller broke a documented precondition (e.g. t > T).
class contract_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Configuration that cannot be honoured: missing capability, bad schedule, bad box.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be read or written.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure during training; carries the iteration that failed.
class training_error : public std::runtime_error {
 public:
  training_error(const std::string& what, long iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

// Environment failure while rolling out an episode; carries the timestep.
class step_error : public std::runtime_error {
 public:
  step_error(const std::string& what, int step)
      : std::runtime_error("environment step " + std::to_string(step) + " failed: " + what),
        step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

}  // namespace saricos
