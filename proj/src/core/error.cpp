#include "manetlab/error.hpp"

namespace manetlab {

std::string_view to_string(Errc code) {
    switch (code) {
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::DuplicateAddress: return "DuplicateAddress";
    case Errc::InvalidFormat: return "InvalidFormat";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::NodeInUse: return "NodeInUse";
    case Errc::ParseError: return "ParseError";
    case Errc::Infeasible: return "Infeasible";
    case Errc::GenerationExhausted: return "GenerationExhausted";
    case Errc::MalformedMatrix: return "MalformedMatrix";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::RejectedTopology: return "RejectedTopology";
    case Errc::MacSpoof: return "MacSpoof";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::StaleScenario: return "StaleScenario";
    case Errc::UnknownScenario: return "UnknownScenario";
    case Errc::Busy: return "Busy";
    case Errc::AlreadyPlaying: return "AlreadyPlaying";
    case Errc::DuplicateAttack: return "DuplicateAttack";
    case Errc::UnknownAttack: return "UnknownAttack";
    case Errc::BadHex: return "BadHex";
    case Errc::FrameTooShort: return "FrameTooShort";
    case Errc::UnknownFlow: return "UnknownFlow";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::CommandFailed: return "CommandFailed";
    case Errc::BackendError: return "BackendError";
    case Errc::ConfigError: return "ConfigError";
    case Errc::BindError: return "BindError";
    case Errc::MalformedRequest: return "MalformedRequest";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error(Errc::ParseError, "line " + std::to_string(line) + ": " + message), line_(line) {}

GenerationExhausted::GenerationExhausted(std::uint64_t over_connected, std::uint64_t disconnected,
                                         const std::string& context)
    : Error(Errc::GenerationExhausted,
            (context.empty() ? std::string() : context + ": ") + "no acceptable topology after " +
                std::to_string(over_connected + disconnected) + " attempts (" +
                std::to_string(over_connected) + " over-connected, " +
                std::to_string(disconnected) + " disconnected)"),
      over_connected_(over_connected),
      disconnected_(disconnected) {}

CommandFailed::CommandFailed(int exit_code, std::string output)
    : Error(Errc::CommandFailed, "command exited with status " + std::to_string(exit_code)),
      exit_code_(exit_code),
      output_(std::move(output)) {}

}  // namespace manetlab
