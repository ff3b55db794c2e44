/* Copyright 2026 The AutoLibra Engine Authors. All Rights Reserved.

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

#ifndef AUTOLIBRA_CORE_ERRORS_HPP_
#define AUTOLIBRA_CORE_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace autolibra {

// Stable error categories. The numeric values are part of the C API
// (al_status) and must not be reordered.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kParse = 2,
  kValidation = 3,
  kNotFound = 4,
  kSplit = 5,
  kCassetteMiss = 6,
  kTransport = 7,
  kStructuredOutput = 8,
  kGrounding = 9,
  kCardinality = 10,
  kSchema = 11,
  kFrozenDefinition = 12,
  kJudgeSchema = 13,
  kEmptyEvaluation = 14,
  kOptimizer = 15,
  kEpisode = 16,
  kStageInput = 17,
  kCorruptRatings = 18,
  kIo = 19,
  kInternal = 20,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

#define AUTOLIBRA_DEFINE_ERROR(Name, Code)                       \
  class Name : public Error {                                    \
   public:                                                       \
    explicit Name(const std::string& message)                    \
        : Error(ErrorCode::Code, message) {}                     \
  }

AUTOLIBRA_DEFINE_ERROR(InvalidArgumentError, kInvalidArgument);
AUTOLIBRA_DEFINE_ERROR(ParseError, kParse);
AUTOLIBRA_DEFINE_ERROR(ValidationError, kValidation);
AUTOLIBRA_DEFINE_ERROR(NotFoundError, kNotFound);
AUTOLIBRA_DEFINE_ERROR(SplitError, kSplit);
AUTOLIBRA_DEFINE_ERROR(CassetteMissError, kCassetteMiss);
AUTOLIBRA_DEFINE_ERROR(TransportError, kTransport);
AUTOLIBRA_DEFINE_ERROR(StructuredOutputError, kStructuredOutput);
AUTOLIBRA_DEFINE_ERROR(GroundingError, kGrounding);
AUTOLIBRA_DEFINE_ERROR(CardinalityError, kCardinality);
AUTOLIBRA_DEFINE_ERROR(SchemaError, kSchema);
AUTOLIBRA_DEFINE_ERROR(FrozenDefinitionError, kFrozenDefinition);
AUTOLIBRA_DEFINE_ERROR(JudgeSchemaError, kJudgeSchema);
AUTOLIBRA_DEFINE_ERROR(EmptyEvaluationError, kEmptyEvaluation);
AUTOLIBRA_DEFINE_ERROR(OptimizerError, kOptimizer);
AUTOLIBRA_DEFINE_ERROR(StageInputError, kStageInput);
AUTOLIBRA_DEFINE_ERROR(CorruptRatingsError, kCorruptRatings);
AUTOLIBRA_DEFINE_ERROR(IoError, kIo);

#undef AUTOLIBRA_DEFINE_ERROR

class EmptyGroundingError : public GroundingError {
 public:
  using GroundingError::GroundingError;
};

class GroundingBoundsError : public GroundingError {
 public:
  using GroundingError::GroundingError;
};

class GroundingCountError : public GroundingError {
 public:
  using GroundingError::GroundingError;
};

// Retryable endpoint failure (connection reset, HTTP 429/5xx). The gateway
// converts exhaustion of retries into TransportError.
class TransientBackendError : public TransportError {
 public:
  using TransportError::TransportError;
};

// A failure inside complete_batch / parallel execution, tagged with the
// index of the failing element. Keeps the code of the underlying error.
class BatchError : public Error {
 public:
  BatchError(ErrorCode code, std::size_t index, const std::string& message)
      : Error(code, "item " + std::to_string(index) + ": " + message),
        index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

}  // namespace autolibra

#endif  // AUTOLIBRA_CORE_ERRORS_HPP_
