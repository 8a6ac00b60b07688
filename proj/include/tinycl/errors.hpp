/*
 * Copyright 2026 The TinyCL Simulator Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tinycl {

/// Shapes or device parameters that cannot be honored by the dataflow.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A PU or memory primitive was driven outside its operating contract.
class ContractError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Malformed input data (dataset files, labels).
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
  public:
    ParseError(const std::string& what, std::size_t offset)
        : DataError(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_;
};

/// A memory group was asked to hold more than its configured capacity.
class CapacityError : public ConfigError {
  public:
    CapacityError(const std::string& what, std::size_t required, std::size_t available)
        : ConfigError(what + ": requires " + std::to_string(required) + " bytes, " +
                      std::to_string(available) + " available"),
          required_(required),
          available_(available) {}

    std::size_t required() const { return required_; }
    std::size_t available() const { return available_; }

  private:
    std::size_t required_;
    std::size_t available_;
};

}  // namespace tinycl
