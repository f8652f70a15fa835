#pragma once

#include <stdexcept>
#include <string>

namespace schottky {

enum class ErrorCode {
    InvalidArgument = 1,
    Structure,        // mismatched list lengths, bad indices
    Validation,       // group fails a geometric invariant
    PoleProximity,
    Convergence,      // series tail, quadrature doubling, Newton
    PathPlanning,
    BranchTracking,
    RankDeficient,
    Normalization,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace schottky
