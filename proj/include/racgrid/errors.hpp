/*
 * Copyright 2026 The racgrid Authors
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

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace racgrid {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownStation : public Error {
 public:
  explicit UnknownStation(const std::string& id) : Error("unknown station: " + id) {}
};

class UnknownFile : public Error {
 public:
  explicit UnknownFile(const std::string& id) : Error("unknown file: " + id) {}
};

class DuplicateFile : public Error {
 public:
  explicit DuplicateFile(const std::string& id) : Error("duplicate file: " + id) {}
};

class UnknownReplica : public Error {
 public:
  using Error::Error;
};

class PinnedRemovalRefused : public Error {
 public:
  using Error::Error;
};

class NoReplica : public Error {
 public:
  explicit NoReplica(const std::string& id) : Error("no replica of file: " + id) {}
};

class EmptyRacList : public Error {
 public:
  EmptyRacList() : Error("partition requires at least one RAC") {}
};

/// The pinned set does not leave the minimum on-demand area free.
class PinnedOverflow : public Error {
 public:
  using Error::Error;
};

class FileLargerThanCache : public Error {
 public:
  using Error::Error;
};

class TapeOverflow : public Error {
 public:
  using Error::Error;
};

class NoPath : public Error {
 public:
  NoPath(const std::string& from, const std::string& to)
      : Error("no network path from " + from + " to " + to) {}
};

class NoCpuInRegion : public Error {
 public:
  explicit NoCpuInRegion(const std::string& region)
      : Error("no station with CPU in region " + region) {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Carries every violation found; what() joins them.
class ValidationFailed : public Error {
 public:
  explicit ValidationFailed(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "validation failed";
    for (const auto& s : v) {
      out += "\n  ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

/// Pre-run capacity failure; one entry per offending station.
class CapacityViolations : public PinnedOverflow {
 public:
  explicit CapacityViolations(std::vector<std::string> violations)
      : PinnedOverflow(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "pinned overflow";
    for (const auto& s : v) {
      out += "\n  ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace racgrid
