#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace manetlab {

// Every failure the testbed reports to an operator carries one of these codes.
// The control API maps them onto HTTP status codes and uses to_string() as the
// "error" field of the JSON error body.
enum class Errc {
    DuplicateName,
    DuplicateAddress,
    InvalidFormat,
    UnknownNode,
    NodeInUse,
    ParseError,
    Infeasible,
    GenerationExhausted,
    MalformedMatrix,
    DimensionMismatch,
    RejectedTopology,
    MacSpoof,
    OutOfRange,
    StaleScenario,
    UnknownScenario,
    Busy,
    AlreadyPlaying,
    DuplicateAttack,
    UnknownAttack,
    BadHex,
    FrameTooShort,
    UnknownFlow,
    InvalidSpec,
    CommandFailed,
    BackendError,
    ConfigError,
    BindError,
    MalformedRequest,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message);

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Thrown by the topology generator once max_attempts samples were rejected.
class GenerationExhausted : public Error {
public:
    GenerationExhausted(std::uint64_t over_connected, std::uint64_t disconnected,
                        const std::string& context = {});

    std::uint64_t over_connected() const noexcept { return over_connected_; }
    std::uint64_t disconnected() const noexcept { return disconnected_; }

private:
    std::uint64_t over_connected_;
    std::uint64_t disconnected_;
};

class CommandFailed : public Error {
public:
    CommandFailed(int exit_code, std::string output);

    int exit_code() const noexcept { return exit_code_; }
    const std::string& output() const noexcept { return output_; }

private:
    int exit_code_;
    std::string output_;
};

}  // namespace manetlab
