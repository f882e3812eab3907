// Copyright 2026 The MAP-SNN Authors
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

#ifndef MAPSNN_ERROR_HPP_
#define MAPSNN_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace mapsnn {

// Base class of every error raised by the engine. The C API maps each
// subclass onto a distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration or mismatched shapes between components.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed event file or checkpoint.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A non-finite value appeared in the forward or backward pass.
class NumericFault : public Error {
 public:
  NumericFault(const std::string& what, int layer, int step)
      : Error(what + " (layer " + std::to_string(layer) + ", step " +
              std::to_string(step) + ")"),
        layer_(layer),
        step_(step) {}
  explicit NumericFault(const std::string& what)
      : Error(what), layer_(-1), step_(-1) {}

  int layer() const { return layer_; }
  int step() const { return step_; }

 private:
  int layer_;
  int step_;
};

}  // namespace mapsnn

#endif  // MAPSNN_ERROR_HPP_
