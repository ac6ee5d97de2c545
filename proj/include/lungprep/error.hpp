/*
 * Copyright 2026 The lungprep Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
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
#include <string_view>

namespace lungprep {

enum class ErrorCode {
  // dicom
  UnsupportedTransferSyntax,
  UnsupportedPixelFormat,
  MissingTag,
  MalformedElement,
  InconsistentGeometry,
  DuplicateSlicePosition,
  NonUniformSpacing,
  // lvol / lvw
  BadMagic,
  UnsupportedVersion,
  TruncatedPayload,
  WrongDtype,
  // processing
  InvalidSpacing,
  SegmentationEmpty,
  EmptyMask,
  InvalidWindow,
  ShapeMismatch,
  // objectives / evaluate
  LengthMismatch,
  InvalidRate,
  DegenerateLabels,
  EmptyInput,
  UnsortedThresholds,
  // phantom / cli
  InvalidSpec,
  ManifestNotFound,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above, so
/// callers can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lungprep
