#pragma once

#include <stdexcept>
#include <string>

namespace sfcsim {

enum class Errc {
  CapacityC1,         // per-DC storage budget exceeded
  CapacityC2,         // per-DC compute budget exceeded
  CapacityRam,        // per-DC RAM budget exceeded
  NoIdleInstance,     // uninstall requested but every instance is busy
  NotInstalled,       // uninstall requested for a type with zero instances
  BandwidthExceeded,  // link reservation would exceed capacity
  ReleaseUnderflow,   // releasing more bandwidth than is reserved
  NoRequests,         // acceptance ratio undefined without generated requests
  ShapeMismatch,      // tensor dimensions disagree
  DatasetTooSmall,    // collection budget exhausted before the row target
  Diverged,           // training loss became non-finite
  Checkpoint,         // unreadable or incompatible checkpoint file
  Parse,              // malformed config file
  Validation          // well-formed config with an invalid value
};

constexpr const char* errc_name(Errc c) {
  switch (c) {
    case Errc::CapacityC1: return "CapacityExceeded(C1)";
    case Errc::CapacityC2: return "CapacityExceeded(C2)";
    case Errc::CapacityRam: return "CapacityExceeded(RAM)";
    case Errc::NoIdleInstance: return "NoIdleInstance";
    case Errc::NotInstalled: return "NotInstalled";
    case Errc::BandwidthExceeded: return "BandwidthExceeded";
    case Errc::ReleaseUnderflow: return "ReleaseUnderflow";
    case Errc::NoRequests: return "NoRequests";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::DatasetTooSmall: return "DatasetTooSmall";
    case Errc::Diverged: return "Diverged";
    case Errc::Checkpoint: return "CheckpointError";
    case Errc::Parse: return "ParseError";
    case Errc::Validation: return "ValidationError";
  }
  return "SimError";
}

class SimError : public std::runtime_error {
 public:
  SimError(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

class ConfigError : public SimError {
 public:
  using SimError::SimError;
};

class CheckpointError : public SimError {
 public:
  explicit CheckpointError(const std::string& msg) : SimError(Errc::Checkpoint, msg) {}
};

}  // namespace sfcsim
