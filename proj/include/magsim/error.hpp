#pragma once

#include <stdexcept>
#include <string>

namespace magsim {

// Broad failure classes; the CLI maps these onto exit codes.
enum class ErrorKind { config, numerical, io };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& name, const std::string& what)
        : std::runtime_error(what), kind_(kind), name_(name) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

private:
    ErrorKind kind_;
    std::string name_;
};

#define MAGSIM_ERROR(Type, Kind)                                            \
    class Type : public Error {                                             \
    public:                                                                 \
        explicit Type(const std::string& what) : Error(Kind, #Type, what) {} \
    }

MAGSIM_ERROR(DegenerateFrame, ErrorKind::numerical);
MAGSIM_ERROR(NonHermitian, ErrorKind::numerical);
MAGSIM_ERROR(InvalidAngle, ErrorKind::config);
MAGSIM_ERROR(InvalidTiming, ErrorKind::config);
MAGSIM_ERROR(InvalidPlan, ErrorKind::config);
MAGSIM_ERROR(NoZeroFound, ErrorKind::numerical);
MAGSIM_ERROR(NoPeak, ErrorKind::numerical);
MAGSIM_ERROR(FitDiverged, ErrorKind::numerical);
MAGSIM_ERROR(CsrNotConfigured, ErrorKind::config);
MAGSIM_ERROR(InconsistentMeasurements, ErrorKind::numerical);
MAGSIM_ERROR(ValidationError, ErrorKind::config);
MAGSIM_ERROR(IoError, ErrorKind::io);

#undef MAGSIM_ERROR

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column)
        : Error(ErrorKind::config, "ParseError",
                what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace magsim
