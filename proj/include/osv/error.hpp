/* Copyright 2026 The osvlm Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef OSV_ERROR_HPP_
#define OSV_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace osv {

// Every error carries a stable machine-readable id ("format", "coverage", ...)
// that the CLI prints on stderr next to the message.
class Error : public std::runtime_error {
 public:
  Error(std::string id, const std::string& what)
      : std::runtime_error(what), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

#define OSV_DEFINE_ERROR(Name, Id)                                \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what) : Error(Id, what) {}   \
  };

OSV_DEFINE_ERROR(IoError, "io")
OSV_DEFINE_ERROR(FormatError, "format")
OSV_DEFINE_ERROR(CorruptionError, "corruption")
OSV_DEFINE_ERROR(ShapeError, "shape")
OSV_DEFINE_ERROR(NumericError, "numeric")
OSV_DEFINE_ERROR(InsufficientDataError, "insufficient_data")
OSV_DEFINE_ERROR(ValidationError, "validation")
OSV_DEFINE_ERROR(ConsistencyError, "consistency")
OSV_DEFINE_ERROR(CoverageError, "coverage")
OSV_DEFINE_ERROR(ParameterError, "parameter")
OSV_DEFINE_ERROR(GeometryError, "geometry")
OSV_DEFINE_ERROR(UndefinedMetricError, "undefined_metric")

#undef OSV_DEFINE_ERROR

}  // namespace osv

#endif  // OSV_ERROR_HPP_
