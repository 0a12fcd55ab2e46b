#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace unicurrent {

// Thrown when an extrapolated sequence of estimates fails to settle within
// the requested tolerance. Carries the last two estimates so callers can
// inspect how far apart they were.
class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, std::complex<double> last,
                     std::complex<double> previous)
      : std::runtime_error(what), last_(last), previous_(previous) {}

  std::complex<double> last_estimate() const { return last_; }
  std::complex<double> previous_estimate() const { return previous_; }

 private:
  std::complex<double> last_;
  std::complex<double> previous_;
};

// Configuration errors detected after a file parsed but before any numerics
// ran. The CLI maps these to a distinct exit code.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace unicurrent
