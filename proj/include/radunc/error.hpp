#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace radunc {

enum class ErrorCode {
    InvalidProbability,
    MissingProbability,
    SentenceOnExpansion,
    NonPositiveSigma,
    InvalidConfig,
    ReplayMiss,
    RemoteFailure,
    MissingLatentSkill,
    EmptyOutcomeList,
    UnknownPhrase,
    ExhaustedOpponents,
    DegenerateAnchors,
    EmptyRanking,
    NoOverlap,
    MissingEntries,
    InsufficientData,
    ItemMismatch,
    UnknownKey,
    DuplicateKey,
    MissingEntity,
    MissingStatus,
    InvalidStatus,
    EmptyLine,
    DictionaryInvalid,
    ProviderFailure,
    CycleDetected,
    FileNotFound,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::MissingProbability: return "MissingProbability";
    case ErrorCode::SentenceOnExpansion: return "SentenceOnExpansion";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ReplayMiss: return "ReplayMiss";
    case ErrorCode::RemoteFailure: return "RemoteFailure";
    case ErrorCode::MissingLatentSkill: return "MissingLatentSkill";
    case ErrorCode::EmptyOutcomeList: return "EmptyOutcomeList";
    case ErrorCode::UnknownPhrase: return "UnknownPhrase";
    case ErrorCode::ExhaustedOpponents: return "ExhaustedOpponents";
    case ErrorCode::DegenerateAnchors: return "DegenerateAnchors";
    case ErrorCode::EmptyRanking: return "EmptyRanking";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::MissingEntries: return "MissingEntries";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ItemMismatch: return "ItemMismatch";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::MissingEntity: return "MissingEntity";
    case ErrorCode::MissingStatus: return "MissingStatus";
    case ErrorCode::InvalidStatus: return "InvalidStatus";
    case ErrorCode::EmptyLine: return "EmptyLine";
    case ErrorCode::DictionaryInvalid: return "DictionaryInvalid";
    case ErrorCode::ProviderFailure: return "ProviderFailure";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI's per-row error column) can branch on it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), m_code(code) {}

    ErrorCode code() const noexcept { return m_code; }

private:
    ErrorCode m_code;
};

} // namespace radunc
