// Copyright 2026 The MKA Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace mka {

/// Failure categories. The CLI maps each one to a distinct exit code.
enum class ErrorCategory {
  kInvalidArgument,
  kNumeric,
  kDegenerateGeometry,
  kInvalidModel,
  kInsufficientCandidates,
  kEmptyPrototype,
  kTrainingDiverged,
  kInvalidDepth,
  kFormat,
  kIo,
  kVocabulary,
  kAlignment,
};

const char* category_name(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCategory::kInvalidArgument, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorCategory::kNumeric, what) {}
};

/// Collinear or otherwise rank-deficient keypoint geometry. `stage` names the
/// solver step that rejected the input.
class DegenerateGeometry : public Error {
 public:
  DegenerateGeometry(std::string stage, const std::string& what)
      : Error(ErrorCategory::kDegenerateGeometry, stage + ": " + what),
        stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

class InvalidModel : public Error {
 public:
  explicit InvalidModel(const std::string& what)
      : Error(ErrorCategory::kInvalidModel, what) {}
};

class InsufficientCandidates : public Error {
 public:
  explicit InsufficientCandidates(const std::string& what)
      : Error(ErrorCategory::kInsufficientCandidates, what) {}
};

class EmptyPrototype : public Error {
 public:
  explicit EmptyPrototype(const std::string& what)
      : Error(ErrorCategory::kEmptyPrototype, what) {}
};

class TrainingDiverged : public Error {
 public:
  TrainingDiverged(int epoch, const std::string& what)
      : Error(ErrorCategory::kTrainingDiverged,
              "training diverged at epoch " + std::to_string(epoch) + ": " + what),
        epoch_(epoch) {}

  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

class InvalidDepth : public Error {
 public:
  explicit InvalidDepth(const std::string& what)
      : Error(ErrorCategory::kInvalidDepth, what) {}
};

/// Binary container rejection reasons. Each has its own code so callers can
/// tell a foreign file from a damaged one.
enum class FormatErrorCode { kBadMagic = 1, kBadVersion = 2, kTruncated = 3, kBadShape = 4 };

class FormatError : public Error {
 public:
  FormatError(FormatErrorCode code, const std::string& what)
      : Error(ErrorCategory::kFormat, what), code_(code) {}

  FormatErrorCode code() const { return code_; }

 private:
  FormatErrorCode code_;
};

class IoError : public Error {
 public:
  IoError(std::string path, const std::string& what)
      : Error(ErrorCategory::kIo, what + ": " + path), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class VocabularyError : public Error {
 public:
  explicit VocabularyError(const std::string& what)
      : Error(ErrorCategory::kVocabulary, what) {}
};

class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string& what)
      : Error(ErrorCategory::kAlignment, what) {}
};

}  // namespace mka
