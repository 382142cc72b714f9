//
// Copyright 2026 The LDP Sampling Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef LDP_SAMPLING_ERRORS_HPP_
#define LDP_SAMPLING_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ldp {

// Bad input: wrong lengths, out-of-range parameters, densities outside the
// declared class.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numeric routine produced a non-finite value or failed its residual check.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, double estimate = 0.0,
                        double residual = 0.0, double abscissa = 0.0)
      : std::runtime_error(what),
        estimate_(estimate),
        residual_(residual),
        abscissa_(abscissa) {}

  double estimate() const { return estimate_; }
  double residual() const { return residual_; }
  double abscissa() const { return abscissa_; }

 private:
  double estimate_;
  double residual_;
  double abscissa_;
};

// A documented precondition of a numeric routine does not hold, e.g. the
// bisection bracket does not straddle the target mass.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Bisection did not reach the tolerance band. Carries the last bracket.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

// Mechanism construction failed although the inputs were accepted.
class MechanismError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ldp

#endif  // LDP_SAMPLING_ERRORS_HPP_
