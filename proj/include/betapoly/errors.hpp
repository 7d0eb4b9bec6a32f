#pragma once

#include <stdexcept>
#include <string>

namespace betapoly {

// Precondition / parameter-domain failures. CLI maps these to exit code 2.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested accuracy could not be reached; carries the best estimate found.
// CLI maps these to exit code 4.
class tolerance_error : public std::runtime_error {
 public:
  tolerance_error(const std::string& msg, double best_log_value, double rel_error)
      : std::runtime_error(msg), best_log_value_(best_log_value), rel_error_(rel_error) {}
  double best_log_value() const { return best_log_value_; }
  double rel_error() const { return rel_error_; }

 private:
  double best_log_value_;
  double rel_error_;
};

// Numerical solver gave up (iteration cap, pivot breakdown). Never a silent
// wrong answer.
class solver_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal consistency check failed, e.g. a probability landed well
// outside [0,1]. Indicates a bug, not bad input.
class invariant_violation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace betapoly
