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

#include "lungprep/error.hpp"

namespace lungprep {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnsupportedTransferSyntax: return "UnsupportedTransferSyntax";
    case ErrorCode::UnsupportedPixelFormat: return "UnsupportedPixelFormat";
    case ErrorCode::MissingTag: return "MissingTag";
    case ErrorCode::MalformedElement: return "MalformedElement";
    case ErrorCode::InconsistentGeometry: return "InconsistentGeometry";
    case ErrorCode::DuplicateSlicePosition: return "DuplicateSlicePosition";
    case ErrorCode::NonUniformSpacing: return "NonUniformSpacing";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::WrongDtype: return "WrongDtype";
    case ErrorCode::InvalidSpacing: return "InvalidSpacing";
    case ErrorCode::SegmentationEmpty: return "SegmentationEmpty";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidRate: return "InvalidRate";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::UnsortedThresholds: return "UnsortedThresholds";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ManifestNotFound: return "ManifestNotFound";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace lungprep
