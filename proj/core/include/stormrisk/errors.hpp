// Typed input errors shared by parsers, the simulation engine and the CLI.
#pragma once

#include <stdexcept>
#include <string>

namespace stormrisk {

enum class Errc {
  malformed_file,
  malformed_row,
  non_monotonic_time,
  empty_track,
  non_positive_dt,
  out_of_bounds,
  duplicate_feeder_id,
  unknown_region,
  empty_poles,
  non_positive_beta,
  missing_region,
  degenerate_uniform,
  coverage_gap,
  timestamp_mismatch,
  insufficient_points,
  degenerate_data,
  invalid_config,
};

const char* errc_name(Errc c);

// Raised for anything the caller fed us: bad files, bad parameters, missing
// coverage. Everything else (logic bugs, I/O failures mid-write) surfaces as
// std::runtime_error and maps to a distinct process exit class in the CLI.
class InputError : public std::runtime_error {
public:
  InputError(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::malformed_file: return "MalformedFile";
    case Errc::malformed_row: return "MalformedRow";
    case Errc::non_monotonic_time: return "NonMonotonicTime";
    case Errc::empty_track: return "EmptyTrack";
    case Errc::non_positive_dt: return "NonPositiveDt";
    case Errc::out_of_bounds: return "OutOfBounds";
    case Errc::duplicate_feeder_id: return "DuplicateFeederId";
    case Errc::unknown_region: return "UnknownRegion";
    case Errc::empty_poles: return "EmptyPoles";
    case Errc::non_positive_beta: return "NonPositiveBeta";
    case Errc::missing_region: return "MissingRegion";
    case Errc::degenerate_uniform: return "DegenerateUniform";
    case Errc::coverage_gap: return "CoverageGap";
    case Errc::timestamp_mismatch: return "TimestampMismatch";
    case Errc::insufficient_points: return "InsufficientPoints";
    case Errc::degenerate_data: return "DegenerateData";
    case Errc::invalid_config: return "InvalidConfig";
  }
  return "UnknownError";
}

}  // namespace stormrisk
