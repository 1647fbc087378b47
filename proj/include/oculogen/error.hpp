// Copyright 2026 The Oculogen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oculogen {

enum class Errc {
  DegenerateFrame,
  DegenerateMesh,
  InvalidParams,
  OutOfRange,
  SnapFailed,
  EmptyEnumeration,
  MalformedHdr,
  IoError,
  BlackEnvironment,
  NonPositiveScale,
  EmptyScene,
  InconsistentPose,
  ParseError,
  UnknownKey,
  RangeError,
  TooFewImages,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::DegenerateFrame: return "DegenerateFrame";
    case Errc::DegenerateMesh: return "DegenerateMesh";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::SnapFailed: return "SnapFailed";
    case Errc::EmptyEnumeration: return "EmptyEnumeration";
    case Errc::MalformedHdr: return "MalformedHdr";
    case Errc::IoError: return "IoError";
    case Errc::BlackEnvironment: return "BlackEnvironment";
    case Errc::NonPositiveScale: return "NonPositiveScale";
    case Errc::EmptyScene: return "EmptyScene";
    case Errc::InconsistentPose: return "InconsistentPose";
    case Errc::ParseError: return "ParseError";
    case Errc::UnknownKey: return "UnknownKey";
    case Errc::RangeError: return "RangeError";
    case Errc::TooFewImages: return "TooFewImages";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace oculogen
