// Copyright 2026 The ksmooth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KSMOOTH_ERRORS_HPP_
#define KSMOOTH_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ksmooth {

// Base class for every error raised by the library. `category()` is a stable
// machine-readable tag (used by the CLI for its error reports).
class Error : public std::runtime_error {
 public:
  Error(std::string category, std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message),
        category_(std::move(category)),
        module_(std::move(module)) {}

  const std::string& category() const { return category_; }
  const std::string& module() const { return module_; }

 private:
  std::string category_;
  std::string module_;
};

class ShapeMismatch : public Error {
 public:
  ShapeMismatch(std::string module, const std::string& message)
      : Error("ShapeMismatch", std::move(module), message) {}
};

// Raised when a Cholesky factorization fails; `block()` is the 0-based block
// (time step) index at which it failed, or -1 when not block-specific.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(std::string module, const std::string& message,
                      int block = -1)
      : Error("NotPositiveDefinite", std::move(module), message),
        block_(block) {}
  int block() const { return block_; }

 private:
  int block_;
};

class InvalidParameter : public Error {
 public:
  InvalidParameter(std::string module, const std::string& message)
      : Error("InvalidParameter", std::move(module), message) {}
};

class LineSearchFailed : public Error {
 public:
  LineSearchFailed(std::string module, const std::string& message)
      : Error("LineSearchFailed", std::move(module), message) {}
};

class Infeasible : public Error {
 public:
  Infeasible(std::string module, const std::string& message)
      : Error("Infeasible", std::move(module), message) {}
};

class SubproblemInfeasible : public Error {
 public:
  SubproblemInfeasible(std::string module, const std::string& message)
      : Error("SubproblemInfeasible", std::move(module), message) {}
};

// An iterative solver ran out of iterations before meeting its tolerance.
// `residual()` is the final optimality residual.
class MaxIterReached : public Error {
 public:
  MaxIterReached(std::string module, const std::string& message,
                 double residual)
      : Error("MaxIterReached", std::move(module), message),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class Unbounded : public Error {
 public:
  Unbounded(std::string module, const std::string& message)
      : Error("Unbounded", std::move(module), message) {}
};

class NotInCatalog : public Error {
 public:
  NotInCatalog(std::string module, const std::string& message)
      : Error("NotInCatalog", std::move(module), message) {}
};

class AllMeasurementsRemoved : public Error {
 public:
  AllMeasurementsRemoved(std::string module, const std::string& message)
      : Error("AllMeasurementsRemoved", std::move(module), message) {}
};

}  // namespace ksmooth

#endif  // KSMOOTH_ERRORS_HPP_
