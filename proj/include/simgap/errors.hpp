#pragma once

#include <stdexcept>
#include <string>

namespace simgap {

// Error categories; exit_code() gives the CLI process exit status.
enum class ErrKind {
    InvalidArgs,        // bad parameters, bad gap, bad config
    UnsupportedFormat,  // wrong codec / bit depth / channel count
    IoError,            // file system failures
    EmptySignal,
    CorruptData,        // non-finite samples, truncated chunks
    InvalidRate,
    InvalidLength,
    InvalidRange,
    InvalidKernelLength,
    ParamMismatch,
    DimensionMismatch,
    NotInvertible,
    GapOutOfBounds,
    InvalidGap,
    NotEnoughFrames,
    NoValidQueries,
    NoTransitionFound,
    CandidateOverflow,
    OutOfBounds,
    SignalTooShort,
    Internal,
};

class Error : public std::runtime_error {
  public:
    Error(ErrKind kind, const std::string& msg)
        : std::runtime_error(name(kind) + ": " + msg), kind_(kind) {}

    ErrKind kind() const { return kind_; }

    static std::string name(ErrKind k) {
        switch (k) {
            case ErrKind::InvalidArgs: return "InvalidArgs";
            case ErrKind::UnsupportedFormat: return "UnsupportedFormat";
            case ErrKind::IoError: return "IoError";
            case ErrKind::EmptySignal: return "EmptySignal";
            case ErrKind::CorruptData: return "CorruptData";
            case ErrKind::InvalidRate: return "InvalidRate";
            case ErrKind::InvalidLength: return "InvalidLength";
            case ErrKind::InvalidRange: return "InvalidRange";
            case ErrKind::InvalidKernelLength: return "InvalidKernelLength";
            case ErrKind::ParamMismatch: return "ParamMismatch";
            case ErrKind::DimensionMismatch: return "DimensionMismatch";
            case ErrKind::NotInvertible: return "NotInvertible";
            case ErrKind::GapOutOfBounds: return "GapOutOfBounds";
            case ErrKind::InvalidGap: return "InvalidGap";
            case ErrKind::NotEnoughFrames: return "NotEnoughFrames";
            case ErrKind::NoValidQueries: return "NoValidQueries";
            case ErrKind::NoTransitionFound: return "NoTransitionFound";
            case ErrKind::CandidateOverflow: return "CandidateOverflow";
            case ErrKind::OutOfBounds: return "OutOfBounds";
            case ErrKind::SignalTooShort: return "SignalTooShort";
            case ErrKind::Internal: return "Internal";
        }
        return "Unknown";
    }

    // 0 ok, 2 invalid args, 3 unsupported format, 4 no transition found, 5 internal
    int exit_code() const {
        switch (kind_) {
            case ErrKind::InvalidArgs:
            case ErrKind::InvalidRate:
            case ErrKind::InvalidLength:
            case ErrKind::InvalidRange:
            case ErrKind::InvalidKernelLength:
            case ErrKind::GapOutOfBounds:
            case ErrKind::InvalidGap:
            case ErrKind::SignalTooShort:
                return 2;
            case ErrKind::UnsupportedFormat:
            case ErrKind::IoError:
            case ErrKind::EmptySignal:
            case ErrKind::CorruptData:
                return 3;
            case ErrKind::NotEnoughFrames:
            case ErrKind::NoValidQueries:
            case ErrKind::NoTransitionFound:
                return 4;
            default:
                return 5;
        }
    }

  private:
    ErrKind kind_;
};

}  // namespace simgap
