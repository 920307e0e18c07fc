#pragma once

#include <stdexcept>
#include <string>

namespace aggrum {

enum class Errc {
    InvalidInput,
    ItemNotInMenu,
    GroundMismatch,
    MissingLambdaForMenu,
    InvalidTuple,
    AggregateNotInMenu,
    DomainClosureViolated,
    IncompleteDomain,
    DomainTooLarge,
    AxiomViolated,
    VariantUnavailable,
    EmptySupport,
    NotRURational,
    TooLarge,
    NotMenuIndependent,
    MissingUtility,
    NotIdentified,
    NoConvergence,
};

const char* errc_name(Errc c) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace aggrum
