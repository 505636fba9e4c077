// Copyright 2026 The lrsd-lab Authors
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

#ifndef LRSD_ERROR_HPP
#define LRSD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace lrsd {

enum class ErrorKind {
    LengthMismatch,
    IndexOutOfRange,
    ParseError,
    ForcedImpossible,
    NotAnticommuting,
    MixedState,
    ZeroProbabilityBranch,
    InvalidTrajectory,
    RegionTooLarge,
    PreconditionViolated,
    NonStabilizer,
    MixedStateUnsupported,
    UnsupportedStructure,
    WrongModel,
    TooLarge,
    NoValidWindow,
    DegenerateFit,
    NoCrossing,
    SchemaMismatch,
    InvalidConfig,
};

inline const char *error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ForcedImpossible: return "ForcedImpossible";
        case ErrorKind::NotAnticommuting: return "NotAnticommuting";
        case ErrorKind::MixedState: return "MixedState";
        case ErrorKind::ZeroProbabilityBranch: return "ZeroProbabilityBranch";
        case ErrorKind::InvalidTrajectory: return "InvalidTrajectory";
        case ErrorKind::RegionTooLarge: return "RegionTooLarge";
        case ErrorKind::PreconditionViolated: return "PreconditionViolated";
        case ErrorKind::NonStabilizer: return "NonStabilizer";
        case ErrorKind::MixedStateUnsupported: return "MixedStateUnsupported";
        case ErrorKind::UnsupportedStructure: return "UnsupportedStructure";
        case ErrorKind::WrongModel: return "WrongModel";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::NoValidWindow: return "NoValidWindow";
        case ErrorKind::DegenerateFit: return "DegenerateFit";
        case ErrorKind::NoCrossing: return "NoCrossing";
        case ErrorKind::SchemaMismatch: return "SchemaMismatch";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {
    }
    ErrorKind kind() const noexcept {
        return kind_;
    }

   private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &message) {
    throw Error(kind, message);
}

}  // namespace lrsd

#endif
