#pragma once
// errors.hpp -- shared error taxonomy.  Every throwing operation documents
// which kinds it can raise; kinds are stable identifiers used by the CLI.

#include <stdexcept>
#include <string>

namespace diffeolab {

enum class Err {
    SubstitutionOutsideClass,
    BreakLocusUnsupported,
    DimensionMismatch,
    InvalidSubspace,
    UnsupportedCombination,
    NotBaseIdentity,
    PointDimMismatch,
    IrrationalBreakpoint,
    UnsupportedBaseDim,
    BaseMismatch,
    NonCoordinateSubspace,
    LiftNotSmooth,
    LiftNotLinear,
    FNotInjective,
    ProjectionMismatch,
    HypothesisFailed,
    WitnessMismatch,
    StrataMismatch,
    NotAPseudometric,
    Incompatible,
    UnknownName,
    ParseFailure,
};

inline const char* err_name(Err e) {
    switch (e) {
        case Err::SubstitutionOutsideClass: return "SubstitutionOutsideClass";
        case Err::BreakLocusUnsupported: return "BreakLocusUnsupported";
        case Err::DimensionMismatch: return "DimensionMismatch";
        case Err::InvalidSubspace: return "InvalidSubspace";
        case Err::UnsupportedCombination: return "UnsupportedCombination";
        case Err::NotBaseIdentity: return "NotBaseIdentity";
        case Err::PointDimMismatch: return "PointDimMismatch";
        case Err::IrrationalBreakpoint: return "IrrationalBreakpoint";
        case Err::UnsupportedBaseDim: return "UnsupportedBaseDim";
        case Err::BaseMismatch: return "BaseMismatch";
        case Err::NonCoordinateSubspace: return "NonCoordinateSubspace";
        case Err::LiftNotSmooth: return "LiftNotSmooth";
        case Err::LiftNotLinear: return "LiftNotLinear";
        case Err::FNotInjective: return "FNotInjective";
        case Err::ProjectionMismatch: return "ProjectionMismatch";
        case Err::HypothesisFailed: return "HypothesisFailed";
        case Err::WitnessMismatch: return "WitnessMismatch";
        case Err::StrataMismatch: return "StrataMismatch";
        case Err::NotAPseudometric: return "NotAPseudometric";
        case Err::Incompatible: return "Incompatible";
        case Err::UnknownName: return "UnknownName";
        case Err::ParseFailure: return "ParseError";
    }
    return "Error";
}

struct Error : std::runtime_error {
    Err kind;
    Error(Err k, const std::string& msg)
        : std::runtime_error(std::string(err_name(k)) + ": " + msg), kind(k) {}
};

// Parse errors carry a source position (1-based) and the expected-set text.
struct ParseError : Error {
    int line, column;
    std::string expected;
    ParseError(int ln, int col, const std::string& exp)
        : Error(Err::ParseFailure,
                "line " + std::to_string(ln) + ", column " + std::to_string(col) +
                    ": expected " + exp),
          line(ln), column(col), expected(exp) {}
};

}  // namespace diffeolab
