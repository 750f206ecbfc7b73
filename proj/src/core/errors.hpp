#pragma once

#include <stdexcept>
#include <string>

namespace itflow {

// Every failure raised by the library carries one of these codes so callers
// (and the C API) can react without parsing message text.
enum class Err {
  DuplicateId,
  UnknownNode,
  UnknownPort,
  UnknownDevice,
  UnknownObject,
  TypeMismatch,
  CycleCreated,
  CycleDetected,
  UnsortedTimestamps,
  UnknownSampleKind,
  NoPickPort,
  UnsupportedParam,
  InvalidParam,
  UnknownInternalPort,
  InternalCycle,
  InvalidStartPose,
  XmlSyntax,
  UnknownElement,
  MissingAttribute,
  DuplicateName,
  UnknownType,
  FactoryFailure,
  ValidationFailed,
  UnresolvedDirective,
  ParseError,
  Io,
};

const char* to_string(Err code);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& message) { throw Error(code, message); }

inline const char* to_string(Err code) {
  switch (code) {
    case Err::DuplicateId: return "DuplicateId";
    case Err::UnknownNode: return "UnknownNode";
    case Err::UnknownPort: return "UnknownPort";
    case Err::UnknownDevice: return "UnknownDevice";
    case Err::UnknownObject: return "UnknownObject";
    case Err::TypeMismatch: return "TypeMismatch";
    case Err::CycleCreated: return "CycleCreated";
    case Err::CycleDetected: return "CycleDetected";
    case Err::UnsortedTimestamps: return "UnsortedTimestamps";
    case Err::UnknownSampleKind: return "UnknownSampleKind";
    case Err::NoPickPort: return "NoPickPort";
    case Err::UnsupportedParam: return "UnsupportedParam";
    case Err::InvalidParam: return "InvalidParam";
    case Err::UnknownInternalPort: return "UnknownInternalPort";
    case Err::InternalCycle: return "InternalCycle";
    case Err::InvalidStartPose: return "InvalidStartPose";
    case Err::XmlSyntax: return "XmlSyntax";
    case Err::UnknownElement: return "UnknownElement";
    case Err::MissingAttribute: return "MissingAttribute";
    case Err::DuplicateName: return "DuplicateName";
    case Err::UnknownType: return "UnknownType";
    case Err::FactoryFailure: return "FactoryFailure";
    case Err::ValidationFailed: return "ValidationFailed";
    case Err::UnresolvedDirective: return "UnresolvedDirective";
    case Err::ParseError: return "ParseError";
    case Err::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace itflow
